#include "gitsearch/note_synthesis.hpp"

#include <algorithm>
#include <chrono>

#include "gitsearch/evidence_search.hpp"
#include "gitsearch/gap_analysis.hpp"
#include "gitsearch/prompts.hpp"

namespace gitsearch {

std::string_view to_string(Phase phase) {
    switch (phase) {
        case Phase::GAPS: return "I";
        case Phase::SEARCH: return "II";
        case Phase::SYNTHESIS: return "III";
    }
    return "I";
}

PromptRequest build_synthesis_prompt(const Tweet& tweet, const EvidenceArticle& article,
                                     const std::string& model_id) {
    if (trim(article.body).empty()) throw EmptyArticle();

    PromptRequest request;
    request.model_id = model_id;
    request.user_text = prompts::replace_slots(
        prompts::note_synthesis_template(),
        {{"[date]", format_date_utc(tweet.published_at)},
         {"[tweet_text]", prompts::escape_slot(tweet.text)},
         {"[targeted_search_article]", prompts::escape_slot(article.body)}});
    request.wants_search = false;
    request.max_output_chars = kNoteCharBudget;
    request.temperature_policy = TemperaturePolicy::DETERMINISTIC;
    return request;
}

namespace {

// Strips one layer of wrapping quotes when the first and last characters form
// a matching pair: "...", '...', or the curly variants.
std::string strip_wrapping_quotes(const std::string& text) {
    struct Pair {
        std::string_view open;
        std::string_view close;
    };
    static constexpr Pair kPairs[] = {
        {"\"", "\""},
        {"'", "'"},
        {"“", "”"}, // curly double
        {"‘", "’"}, // curly single
    };
    for (const Pair& p : kPairs) {
        if (text.size() >= p.open.size() + p.close.size() &&
            std::string_view(text).substr(0, p.open.size()) == p.open &&
            std::string_view(text).substr(text.size() - p.close.size()) == p.close) {
            return text.substr(p.open.size(), text.size() - p.open.size() - p.close.size());
        }
    }
    return text;
}

std::string postprocess_pass(const std::string& text, const UrlNormalizationPolicy& policy) {
    std::string out = trim(text);
    out = strip_wrapping_quotes(out);
    out = trim(out);
    out = decode_html_entities(out);
    out = rewrite_urls(out, policy);
    return out;
}

} // namespace

std::string postprocess(const std::string& text, const UrlNormalizationPolicy& policy) {
    if (trim(text).empty()) throw BlankNote();
    std::string current = text;
    for (int i = 0; i < 16; ++i) {
        std::string next = postprocess_pass(current, policy);
        if (next == current) break;
        current = std::move(next);
    }
    if (current.empty()) throw BlankNote();
    return current;
}

SynthesizedNote synthesize_note(const Tweet& tweet, const EvidenceArticle& article,
                                Gateway& backend, const std::string& model_id,
                                const UrlNormalizationPolicy& policy, TimestampMillis now) {
    const PromptRequest request = build_synthesis_prompt(tweet, article, model_id);
    CompletionResult completion = backend.complete(request);
    std::string text = postprocess(completion.text, policy);

    if (effective_length(text) > kNoteCharBudget) {
        PromptRequest retry = request;
        retry.user_text +=
            "\n\nIMPORTANT: Your previous note exceeded the 280-character limit (each URL counts "
            "as 1 character). Rewrite the Community Note so it fits within 280 characters while "
            "keeping the most important facts and at least one URL.";
        completion = backend.complete(retry);
        text = postprocess(completion.text, policy);
    }

    SynthesizedNote note =
        make_synthesized_note(tweet.tweet_id, text, Method::GITSEARCH, model_id, now, policy);

    // closed-book audit: every cited URL must come from the evidence article
    std::vector<std::string> allowed = article.cited_urls;
    for (const std::string& url : extract_urls(article.body, policy)) {
        if (std::find(allowed.begin(), allowed.end(), url) == allowed.end()) {
            allowed.push_back(url);
        }
    }
    for (const std::string& url : note.urls) {
        if (std::find(allowed.begin(), allowed.end(), url) == allowed.end()) {
            note.hallucinated_url = true;
            break;
        }
    }
    return note;
}

PipelineRecord run_pipeline(const Tweet& tweet, const std::vector<CommunityNote>& candidate_notes,
                            Gateway& backend, const PipelineModels& models,
                            const UrlNormalizationPolicy& policy, TimestampMillis now,
                            const PipelineSink& sink) {
    PipelineRecord record;
    record.tweet_id = tweet.tweet_id;

    const auto timed = [&](const char* name, auto&& fn) {
        const auto start = std::chrono::steady_clock::now();
        auto result = fn();
        record.timings_ms[name] = std::chrono::duration_cast<std::chrono::milliseconds>(
                                      std::chrono::steady_clock::now() - start)
                                      .count();
        return result;
    };

    Phase phase = Phase::GAPS;
    try {
        record.gap_report = timed("phase1_gaps", [&] {
            return detect_gaps({tweet, candidate_notes}, backend, models.gap_model, now);
        });
        if (sink.on_gap_report) sink.on_gap_report(*record.gap_report);

        phase = Phase::SEARCH;
        record.article = timed("phase2_search", [&] {
            return retrieve_evidence({tweet, candidate_notes, *record.gap_report}, backend,
                                     models.search_model, policy, now);
        });
        if (sink.on_article) sink.on_article(*record.article);

        phase = Phase::SYNTHESIS;
        record.note = timed("phase3_synthesis", [&] {
            return synthesize_note(tweet, *record.article, backend, models.synthesis_model, policy,
                                   now);
        });
        if (sink.on_note) sink.on_note(*record.note);

        record.ok = true;
    } catch (const std::exception& e) {
        record.ok = false;
        record.failed_phase = phase;
        record.error = e.what();
    }
    return record;
}

} // namespace gitsearch
