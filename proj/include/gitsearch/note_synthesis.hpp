#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gitsearch/domain.hpp"
#include "gitsearch/gateway.hpp"

namespace gitsearch {

enum class Phase { GAPS, SEARCH, SYNTHESIS };

std::string_view to_string(Phase phase);

/// One application of the three-phase pipeline to one tweet.
struct PipelineRecord {
    std::string tweet_id;
    std::optional<GapReport> gap_report;
    std::optional<EvidenceArticle> article;
    std::optional<SynthesizedNote> note;
    std::map<std::string, std::int64_t> timings_ms;
    bool ok = false;
    std::optional<Phase> failed_phase;
    std::string error;
};

/// Renders the closed-book synthesis instruction from the tweet and the
/// evidence article; no search capability is requested.
PromptRequest build_synthesis_prompt(const Tweet& tweet, const EvidenceArticle& article,
                                     const std::string& model_id);

/// Uniform cleanup applied to every generated note: trim, strip one layer of
/// symmetric wrapping quotes, decode HTML entities, normalize embedded URLs.
/// Iterates to a fixed point so the result is stable under reapplication.
/// Throws BlankNote when nothing is left.
std::string postprocess(const std::string& text, const UrlNormalizationPolicy& policy);

/// Closed-book synthesis with budget verification: one shorten re-ask when the
/// effective length exceeds the budget, after which the note is returned with
/// over_budget set. URLs outside the article's evidence set raise the
/// hallucinated_url flag; a note with no URL raises no_url. Neither is fatal.
SynthesizedNote synthesize_note(const Tweet& tweet, const EvidenceArticle& article,
                                Gateway& backend, const std::string& model_id,
                                const UrlNormalizationPolicy& policy, TimestampMillis now);

/// Model bindings for the three phases.
struct PipelineModels {
    std::string gap_model;
    std::string search_model;
    std::string synthesis_model;
};

/// Receives each intermediate artifact as soon as the producing phase ends,
/// before the next phase starts.
struct PipelineSink {
    std::function<void(const GapReport&)> on_gap_report;
    std::function<void(const EvidenceArticle&)> on_article;
    std::function<void(const SynthesizedNote&)> on_note;
};

/// Executes Phase I..III sequentially for one tweet. A phase failure yields a
/// record with the upstream artifacts retained and the wrapped error.
PipelineRecord run_pipeline(const Tweet& tweet, const std::vector<CommunityNote>& candidate_notes,
                            Gateway& backend, const PipelineModels& models,
                            const UrlNormalizationPolicy& policy, TimestampMillis now,
                            const PipelineSink& sink = {});

} // namespace gitsearch
