#include "gitsearch/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace gitsearch {

std::vector<std::string> tokenize(std::string_view text, const UrlNormalizationPolicy& policy) {
    const std::vector<UrlSpan> spans = find_url_spans(text);
    std::vector<std::string> tokens;

    std::size_t cursor = 0;
    auto flush_words = [&](std::string_view chunk) {
        std::string word;
        auto push = [&] {
            if (!word.empty()) {
                tokens.push_back(word);
                word.clear();
            }
        };
        for (const char c : chunk) {
            const unsigned char u = static_cast<unsigned char>(c);
            // ASCII alphanumerics and all non-ASCII bytes are token characters
            if (std::isalnum(u) || u >= 0x80) {
                word.push_back(static_cast<char>(std::tolower(u)));
            } else {
                push();
            }
        }
        push();
    };

    for (const UrlSpan& span : spans) {
        flush_words(text.substr(cursor, span.begin - cursor));
        tokens.push_back("<url:" + normalize_url(span.view(text), policy) + ">");
        cursor = span.end;
    }
    flush_words(text.substr(cursor));
    return tokens;
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.empty() || b.empty()) return 0;
    std::vector<std::size_t> prev(b.size() + 1, 0);
    std::vector<std::size_t> cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            if (a[i - 1] == b[j - 1]) {
                cur[j] = prev[j - 1] + 1;
            } else {
                cur[j] = std::max(prev[j], cur[j - 1]);
            }
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double rouge_l(std::string_view candidate, std::string_view reference,
               const UrlNormalizationPolicy& policy) {
    const std::vector<std::string> cand = tokenize(candidate, policy);
    const std::vector<std::string> ref = tokenize(reference, policy);
    if (cand.empty() || ref.empty()) return 0.0;
    const std::size_t lcs = lcs_length(cand, ref);
    if (lcs == 0) return 0.0;
    const double precision = static_cast<double>(lcs) / static_cast<double>(cand.size());
    const double recall = static_cast<double>(lcs) / static_cast<double>(ref.size());
    return 2.0 * precision * recall / (precision + recall);
}

std::optional<double> url_recall(const SynthesizedNote& candidate, const CommunityNote& reference,
                                 const UrlNormalizationPolicy& policy) {
    const std::vector<std::string> ref_urls = extract_urls(reference.text, policy);
    if (ref_urls.empty()) return std::nullopt;

    std::set<std::string> cand_set;
    for (const std::string& url : candidate.urls) {
        cand_set.insert(normalize_url(url, policy));
    }
    std::size_t hit = 0;
    for (const std::string& url : ref_urls) {
        if (cand_set.count(url)) ++hit;
    }
    return static_cast<double>(hit) / static_cast<double>(ref_urls.size());
}

CorpusScores score_corpus(const std::vector<SynthesizedNote>& notes,
                          const std::map<std::string, CommunityNote>& references,
                          const UrlNormalizationPolicy& policy) {
    CorpusScores scores;
    scores.reports.reserve(notes.size());

    for (const SynthesizedNote& note : notes) {
        const auto ref = references.find(note.tweet_id);
        if (ref == references.end()) throw MissingReference(note.tweet_id);

        MetricReport report;
        report.tweet_id = note.tweet_id;
        report.method = note.method;
        report.rouge_l = rouge_l(note.text, ref->second.text, policy);
        report.url_recall = url_recall(note, ref->second, policy);
        report.n_urls = static_cast<std::int64_t>(note.urls.size());
        report.char_count = char_count(note.text);
        report.effective_length = effective_length(note.text);
        scores.reports.push_back(std::move(report));
    }

    std::sort(scores.reports.begin(), scores.reports.end(),
              [](const MetricReport& a, const MetricReport& b) {
                  if (a.tweet_id != b.tweet_id) return a.tweet_id < b.tweet_id;
                  return to_string(a.method) < to_string(b.method);
              });

    struct Accumulator {
        std::int64_t n = 0;
        double rouge = 0, recall = 0, urls = 0, chars = 0, eff = 0;
        std::int64_t recall_n = 0, recall_excluded = 0;
    };
    std::map<std::string, std::pair<Method, Accumulator>> by_method;
    for (const MetricReport& r : scores.reports) {
        auto& [method, acc] = by_method[std::string(to_string(r.method))];
        method = r.method;
        ++acc.n;
        acc.rouge += r.rouge_l;
        if (r.url_recall) {
            acc.recall += *r.url_recall;
            ++acc.recall_n;
        } else {
            ++acc.recall_excluded;
        }
        acc.urls += static_cast<double>(r.n_urls);
        acc.chars += static_cast<double>(r.char_count);
        acc.eff += static_cast<double>(r.effective_length);
    }
    for (const auto& [tag, entry] : by_method) {
        (void)tag;
        const auto& [method, acc] = entry;
        MethodSummary s;
        s.method = method;
        s.n_notes = acc.n;
        const double n = static_cast<double>(acc.n);
        s.rouge_l_mean = acc.rouge / n;
        if (acc.recall_n > 0) s.url_recall_mean = acc.recall / static_cast<double>(acc.recall_n);
        s.url_recall_excluded = acc.recall_excluded;
        s.n_urls_mean = acc.urls / n;
        s.char_count_mean = acc.chars / n;
        s.effective_length_mean = acc.eff / n;
        scores.summary.push_back(s);
    }
    return scores;
}

} // namespace gitsearch
