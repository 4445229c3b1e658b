#include "gitsearch/baselines.hpp"

#include <algorithm>

#include "gitsearch/note_synthesis.hpp"
#include "gitsearch/prompts.hpp"

namespace gitsearch {

RatedNoteView make_rated_view(const CommunityNote& note) {
    RatedNoteView view{note, std::nullopt};
    if (note.n_helpful + note.n_nothelpful > 0) view.ratio = helpfulness_ratio(note);
    return view;
}

PromptRequest build_supernote_prompt(const Tweet& tweet,
                                     const std::vector<CommunityNote>& candidate_notes,
                                     const std::string& model_id) {
    std::vector<CommunityNote> notes = candidate_notes;
    std::stable_sort(notes.begin(), notes.end(), [](const CommunityNote& a, const CommunityNote& b) {
        return a.created_at < b.created_at;
    });

    PromptRequest request;
    request.model_id = model_id;
    request.user_text = prompts::replace_slots(
        prompts::supernote_lite_template(),
        {{"[date]", format_date_utc(tweet.published_at)},
         {"[tweet_text]", prompts::escape_slot(tweet.text)},
         {"[existing_notes]",
          prompts::escape_slot(prompts::render_notes_block(notes, /*with_ratios=*/true))}});
    request.wants_search = false;
    request.max_output_chars = kNoteCharBudget;
    request.temperature_policy = TemperaturePolicy::DETERMINISTIC;
    return request;
}

SynthesizedNote supernotes_lite(const Tweet& tweet,
                                const std::vector<CommunityNote>& candidate_notes,
                                Gateway& backend, const std::string& model_id,
                                const UrlNormalizationPolicy& policy, TimestampMillis now) {
    if (candidate_notes.empty()) throw ColdStart(tweet.tweet_id);

    const PromptRequest request = build_supernote_prompt(tweet, candidate_notes, model_id);
    const CompletionResult completion = backend.complete(request);
    const std::string text = postprocess(completion.text, policy);
    return make_synthesized_note(tweet.tweet_id, text, Method::SUPERNOTES_LITE, model_id, now,
                                 policy);
}

PromptRequest build_web_agent_prompt(const Tweet& tweet, const std::string& model_id) {
    PromptRequest request;
    request.model_id = model_id;
    request.user_text = prompts::replace_slots(
        prompts::web_agent_template(), {{"[date]", format_date_utc(tweet.published_at)},
                                        {"[tweet_text]", prompts::escape_slot(tweet.text)}});
    request.wants_search = true;
    request.max_output_chars = kNoteCharBudget;
    request.temperature_policy = TemperaturePolicy::DETERMINISTIC;
    return request;
}

SynthesizedNote web_agent(const Tweet& tweet, Gateway& backend, const std::string& model_id,
                          const UrlNormalizationPolicy& policy, TimestampMillis now) {
    const PromptRequest request = build_web_agent_prompt(tweet, model_id);
    const CompletionResult completion = backend.complete(request);
    const std::string unified =
        append_missing_sources(completion.text, completion.source_urls, policy);
    const std::string text = postprocess(unified, policy);
    return make_synthesized_note(tweet.tweet_id, text, Method::WEB_AGENT, model_id, now, policy);
}

} // namespace gitsearch
