#include "gitsearch/gap_analysis.hpp"

#include <algorithm>
#include <cmath>

#include "gitsearch/jsonl.hpp"
#include "gitsearch/prompts.hpp"

namespace gitsearch {

namespace {

constexpr std::string_view kFormatReminder =
    "\n\nREMINDER: Your previous reply could not be used. Return ONLY a valid JSON array of gap "
    "objects, each with fields gap_type (one of the 6 exact type tokens), description, priority "
    "(integer 1-5), and suggested_query. At least one gap is required when no community notes "
    "exist. No preamble, no explanation, just the JSON array.";

std::vector<CommunityNote> in_created_order(std::vector<CommunityNote> notes) {
    std::stable_sort(notes.begin(), notes.end(), [](const CommunityNote& a, const CommunityNote& b) {
        return a.created_at < b.created_at;
    });
    return notes;
}

} // namespace

void GapPromptContext::validate() const {
    tweet.validate();
    for (const CommunityNote& note : candidate_notes) {
        if (note.tweet_id != tweet.tweet_id) {
            throw InvalidRecord("candidate note " + note.note_id + " references tweet " +
                                note.tweet_id + ", expected " + tweet.tweet_id);
        }
    }
}

PromptRequest build_gap_prompt(const GapPromptContext& ctx, const std::string& model_id) {
    const std::string notes_block =
        prompts::render_notes_block(in_created_order(ctx.candidate_notes), /*with_ratios=*/false);

    PromptRequest request;
    request.model_id = model_id;
    request.user_text = prompts::replace_slots(
        prompts::gap_identification_template(),
        {{"[date]", format_date_utc(ctx.tweet.published_at)},
         {"[tweet_text]", prompts::escape_slot(ctx.tweet.text)},
         {"[existing_notes]", prompts::escape_slot(notes_block)}});
    request.wants_search = false;
    request.temperature_policy = TemperaturePolicy::DETERMINISTIC;
    return request;
}

std::vector<Gap> parse_gap_response(const std::string& raw) {
    const std::optional<Json> array = first_json_array(raw);
    if (!array) throw NoArrayFound();

    std::vector<Gap> gaps;
    for (std::size_t i = 0; i < array->size(); ++i) {
        const Json& element = (*array)[i];
        if (!element.is_object()) throw MissingField("gap_type", i);

        if (!element.contains("gap_type") || !element["gap_type"].is_string()) {
            throw MissingField("gap_type", i);
        }
        const std::string token = element["gap_type"].get<std::string>();
        const auto type = parse_gap_type(token);
        if (!type) throw InvalidGapType(token, i);

        if (!element.contains("description") || !element["description"].is_string() ||
            trim(element["description"].get<std::string>()).empty()) {
            throw MissingField("description", i);
        }
        if (!element.contains("priority")) throw MissingField("priority", i);
        const Json& pr = element["priority"];
        double value = 0;
        if (pr.is_number_integer()) {
            value = static_cast<double>(pr.get<std::int64_t>());
        } else if (pr.is_number()) {
            value = pr.get<double>();
        } else {
            throw MissingField("priority", i);
        }
        if (value < 1 || value > 5 || value != std::floor(value)) {
            throw PriorityOutOfRange(value, i);
        }
        if (!element.contains("suggested_query") || !element["suggested_query"].is_string() ||
            trim(element["suggested_query"].get<std::string>()).empty()) {
            throw MissingField("suggested_query", i);
        }

        Gap gap;
        gap.gap_type = *type;
        gap.description = element["description"].get<std::string>();
        gap.priority = static_cast<int>(value);
        gap.suggested_query = element["suggested_query"].get<std::string>();
        gaps.push_back(std::move(gap));
    }
    return gaps;
}

GapReport detect_gaps(const GapPromptContext& ctx, Gateway& backend, const std::string& model_id,
                      TimestampMillis now) {
    ctx.validate();
    const bool cold_start = ctx.candidate_notes.empty();
    const PromptRequest request = build_gap_prompt(ctx, model_id);

    CompletionResult completion = backend.complete(request);
    std::vector<Gap> gaps;
    bool needs_retry = false;
    try {
        gaps = parse_gap_response(completion.text);
        needs_retry = cold_start && gaps.empty();
    } catch (const Error&) {
        needs_retry = true;
    }

    if (needs_retry) {
        PromptRequest retry = request;
        retry.user_text += kFormatReminder;
        completion = backend.complete(retry);
        gaps = parse_gap_response(completion.text); // second failure propagates
        if (cold_start && gaps.empty()) throw EmptyGapsOnColdStart();
    }

    std::stable_sort(gaps.begin(), gaps.end(),
                     [](const Gap& a, const Gap& b) { return a.priority > b.priority; });

    GapReport report;
    report.tweet_id = ctx.tweet.tweet_id;
    report.gaps = std::move(gaps);
    report.model_id = model_id;
    report.raw_output = completion.text;
    report.created_at = now;
    return report;
}

} // namespace gitsearch
