#include "gitsearch/domain.hpp"

#include <algorithm>

namespace gitsearch {

std::string_view to_string(NoteStatus status) {
    switch (status) {
        case NoteStatus::CRH: return "CRH";
        case NoteStatus::CRNH: return "CRNH";
        case NoteStatus::NMR: return "NMR";
    }
    return "NMR";
}

std::string_view to_string(GapType type) {
    switch (type) {
        case GapType::UNSUBSTANTIATED_CLAIM: return "UNSUBSTANTIATED_CLAIM";
        case GapType::CONTRADICTION: return "CONTRADICTION";
        case GapType::VAGUE_REFERENCE: return "VAGUE_REFERENCE";
        case GapType::MISSING_CONTEXT: return "MISSING_CONTEXT";
        case GapType::SOURCE_VERIFICATION: return "SOURCE_VERIFICATION";
        case GapType::MISSING_COVERAGE: return "MISSING_COVERAGE";
    }
    return "UNSUBSTANTIATED_CLAIM";
}

std::string_view to_string(Method method) {
    switch (method) {
        case Method::GITSEARCH: return "GITSEARCH";
        case Method::SUPERNOTES_LITE: return "SUPERNOTES_LITE";
        case Method::WEB_AGENT: return "WEB_AGENT";
        case Method::HUMAN: return "HUMAN";
    }
    return "GITSEARCH";
}

std::optional<NoteStatus> parse_note_status(std::string_view token) {
    if (token == "CRH" || token == "CURRENTLY_RATED_HELPFUL") return NoteStatus::CRH;
    if (token == "CRNH" || token == "CURRENTLY_RATED_NOT_HELPFUL") return NoteStatus::CRNH;
    if (token == "NMR" || token == "NEEDS_MORE_RATINGS") return NoteStatus::NMR;
    return std::nullopt;
}

std::optional<GapType> parse_gap_type(std::string_view token) {
    for (GapType t : all_gap_types()) {
        if (token == to_string(t)) return t;
    }
    return std::nullopt;
}

std::optional<Method> parse_method(std::string_view token) {
    for (Method m : {Method::GITSEARCH, Method::SUPERNOTES_LITE, Method::WEB_AGENT, Method::HUMAN}) {
        if (token == to_string(m)) return m;
    }
    return std::nullopt;
}

const std::vector<GapType>& all_gap_types() {
    static const std::vector<GapType> kTypes{
        GapType::UNSUBSTANTIATED_CLAIM, GapType::CONTRADICTION,  GapType::VAGUE_REFERENCE,
        GapType::MISSING_CONTEXT,       GapType::SOURCE_VERIFICATION, GapType::MISSING_COVERAGE,
    };
    return kTypes;
}

void Tweet::validate() const {
    if (tweet_id.empty()) throw InvalidRecord("tweet_id is empty");
    if (trim(text).empty()) throw InvalidRecord("tweet " + tweet_id + " has blank text");
}

void CommunityNote::validate() const {
    if (note_id.empty()) throw InvalidRecord("note_id is empty");
    if (n_helpful < 0 || n_nothelpful < 0) {
        throw InvalidRecord("note " + note_id + " has negative rating counts");
    }
}

double helpfulness_ratio(const CommunityNote& note) {
    const std::int64_t total = note.n_helpful + note.n_nothelpful;
    if (total <= 0) throw ZeroRatings();
    return static_cast<double>(note.n_helpful) / static_cast<double>(total);
}

std::int64_t effective_length(std::string_view text) {
    const std::vector<UrlSpan> spans = find_url_spans(text);
    std::int64_t n = static_cast<std::int64_t>(utf8_length(text));
    for (const UrlSpan& span : spans) {
        n -= static_cast<std::int64_t>(utf8_length(span.view(text))) - 1;
    }
    return n;
}

std::int64_t char_count(std::string_view text) {
    return static_cast<std::int64_t>(utf8_length(text));
}

SynthesizedNote make_synthesized_note(std::string tweet_id, std::string text, Method method,
                                       std::optional<std::string> model_id,
                                       TimestampMillis created_at,
                                       const UrlNormalizationPolicy& policy) {
    SynthesizedNote note;
    note.tweet_id = std::move(tweet_id);
    note.text = std::move(text);
    note.urls = extract_urls(note.text, policy);
    note.effective_length = effective_length(note.text);
    note.method = method;
    note.over_budget = note.effective_length > kNoteCharBudget;
    note.model_id = std::move(model_id);
    note.created_at = created_at;
    note.no_url = note.urls.empty();
    return note;
}

} // namespace gitsearch
