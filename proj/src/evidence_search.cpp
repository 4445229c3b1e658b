#include "gitsearch/evidence_search.hpp"

#include <algorithm>

#include "gitsearch/prompts.hpp"

namespace gitsearch {

void SearchPromptContext::validate() const {
    tweet.validate();
    if (gap_report.tweet_id != tweet.tweet_id) {
        throw InvalidRecord("gap report references tweet " + gap_report.tweet_id + ", expected " +
                            tweet.tweet_id);
    }
}

PromptRequest build_search_prompt(const SearchPromptContext& ctx, const std::string& model_id) {
    ctx.validate();
    if (ctx.gap_report.gaps.empty()) throw EmptyGapReport();

    std::vector<Gap> ordered = ctx.gap_report.gaps;
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const Gap& a, const Gap& b) { return a.priority > b.priority; });

    std::vector<CommunityNote> notes = ctx.candidate_notes;
    std::stable_sort(notes.begin(), notes.end(), [](const CommunityNote& a, const CommunityNote& b) {
        return a.created_at < b.created_at;
    });

    PromptRequest request;
    request.model_id = model_id;
    request.user_text = prompts::replace_slots(
        prompts::targeted_search_template(),
        {{"[date]", format_date_utc(ctx.tweet.published_at)},
         {"[tweet_text]", prompts::escape_slot(ctx.tweet.text)},
         {"[existing_notes]", prompts::escape_slot(prompts::render_notes_block(notes, false))},
         {"[gap_context]", prompts::escape_slot(prompts::render_gap_block(ordered))}});
    request.wants_search = true;
    request.temperature_policy = TemperaturePolicy::DETERMINISTIC;
    return request;
}

EvidenceArticle retrieve_evidence(const SearchPromptContext& ctx, Gateway& backend,
                                  const std::string& model_id,
                                  const UrlNormalizationPolicy& policy, TimestampMillis now) {
    const PromptRequest request = build_search_prompt(ctx, model_id);
    const CompletionResult completion = backend.complete(request);
    if (trim(completion.text).empty()) throw EmptyArticle();

    std::vector<std::string> cited = extract_urls(completion.text, policy);
    for (const std::string& url : completion.source_urls) {
        const std::string n = normalize_url(url, policy);
        if (!n.empty() && std::find(cited.begin(), cited.end(), n) == cited.end()) {
            cited.push_back(n);
        }
    }

    EvidenceArticle article;
    article.tweet_id = ctx.tweet.tweet_id;
    article.body = completion.text;
    article.cited_urls = std::move(cited);
    article.model_id = model_id;
    article.searched_at = now;
    return article;
}

} // namespace gitsearch
