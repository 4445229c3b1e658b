#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gitsearch/domain.hpp"

namespace gitsearch {

/// Per-note deterministic metrics against the helpful reference note.
struct MetricReport {
    std::string tweet_id;
    Method method = Method::GITSEARCH;
    double rouge_l = 0.0;
    std::optional<double> url_recall; // absent when the reference cites no URL
    std::int64_t n_urls = 0;
    std::int64_t char_count = 0;
    std::int64_t effective_length = 0;
};

/// Per-method corpus aggregates; url_recall_mean averages only the notes for
/// which the metric is defined.
struct MethodSummary {
    Method method = Method::GITSEARCH;
    std::int64_t n_notes = 0;
    double rouge_l_mean = 0.0;
    std::optional<double> url_recall_mean;
    std::int64_t url_recall_excluded = 0;
    double n_urls_mean = 0.0;
    double char_count_mean = 0.0;
    double effective_length_mean = 0.0;
};

struct CorpusScores {
    std::vector<MetricReport> reports;   // ordered by (tweet_id, method)
    std::vector<MethodSummary> summary;  // ordered by method tag
};

/// Lexical tokens for overlap scoring: URLs become single opaque tokens, the
/// rest is lowercased and split on runs of non-alphanumeric characters.
std::vector<std::string> tokenize(std::string_view text, const UrlNormalizationPolicy& policy = {});

/// Longest-common-subsequence F1 over token lists; 0 when either side is
/// empty or the lists share nothing.
double rouge_l(std::string_view candidate, std::string_view reference,
               const UrlNormalizationPolicy& policy = {});

/// LCS length via dynamic programming (exposed for oracle tests).
std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// |candidate URLs ∩ reference URLs| / |reference URLs|, absent when the
/// reference cites nothing.
std::optional<double> url_recall(const SynthesizedNote& candidate, const CommunityNote& reference,
                                 const UrlNormalizationPolicy& policy);

/// Scores every note against its tweet's reference. Throws MissingReference
/// when a note's tweet has no reference entry.
CorpusScores score_corpus(const std::vector<SynthesizedNote>& notes,
                          const std::map<std::string, CommunityNote>& references,
                          const UrlNormalizationPolicy& policy = {});

} // namespace gitsearch
