#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gitsearch/errors.hpp"
#include "gitsearch/text_util.hpp"
#include "gitsearch/urls.hpp"

namespace gitsearch {

// ---- enumerations -----------------------------------------------------------

enum class NoteStatus { CRH, CRNH, NMR };

enum class GapType {
    UNSUBSTANTIATED_CLAIM,
    CONTRADICTION,
    VAGUE_REFERENCE,
    MISSING_CONTEXT,
    SOURCE_VERIFICATION,
    MISSING_COVERAGE,
};

enum class Method { GITSEARCH, SUPERNOTES_LITE, WEB_AGENT, HUMAN };

std::string_view to_string(NoteStatus status);
std::string_view to_string(GapType type);
std::string_view to_string(Method method);

std::optional<NoteStatus> parse_note_status(std::string_view token);
std::optional<GapType> parse_gap_type(std::string_view token);
std::optional<Method> parse_method(std::string_view token);

/// All six gap types, in taxonomy order.
const std::vector<GapType>& all_gap_types();

// ---- records ------------------------------------------------------------------

struct Tweet {
    std::string tweet_id;
    std::string text;
    TimestampMillis published_at = 0;
    std::optional<std::string> language_tag;
    std::optional<std::string> author_id;

    void validate() const;
};

struct CommunityNote {
    std::string note_id;
    std::string tweet_id;
    std::string text;
    TimestampMillis created_at = 0;
    NoteStatus status = NoteStatus::NMR;
    std::int64_t n_helpful = 0;
    std::int64_t n_nothelpful = 0;
    std::optional<std::string> author_id;
    // context essential only with the attached media, per the dump's flag
    bool media_flagged = false;
    // status-history endpoints, when the ingestion source provides them
    std::optional<TimestampMillis> first_status_at;
    std::optional<TimestampMillis> last_status_at;

    void validate() const;
};

struct Gap {
    GapType gap_type = GapType::UNSUBSTANTIATED_CLAIM;
    std::string description;
    int priority = 1; // 1..5
    std::string suggested_query;

    bool operator==(const Gap&) const = default;
};

struct GapReport {
    std::string tweet_id;
    std::vector<Gap> gaps; // sorted by priority descending, stable
    std::string model_id;
    std::string raw_output;
    TimestampMillis created_at = 0;
};

struct EvidenceArticle {
    std::string tweet_id;
    std::string body;
    std::vector<std::string> cited_urls; // normalized, deduplicated
    std::string model_id;
    TimestampMillis searched_at = 0;
};

struct SynthesizedNote {
    std::string tweet_id;
    std::string text; // URLs embedded inline
    std::vector<std::string> urls;
    std::int64_t effective_length = 0;
    Method method = Method::GITSEARCH;
    bool over_budget = false;
    std::optional<std::string> model_id;
    TimestampMillis created_at = 0;
    // warning flags, surfaced in run summaries
    bool no_url = false;
    bool hallucinated_url = false;
};

/// Platform budget for one note; URLs count as a single character.
inline constexpr std::int64_t kNoteCharBudget = 280;

// ---- operations -----------------------------------------------------------------

/// Fraction of helpful ratings, n_helpful / (n_helpful + n_nothelpful).
/// Throws ZeroRatings when the note has no ratings at all; callers must omit
/// the score instead of fabricating one.
double helpfulness_ratio(const CommunityNote& note);

/// Unicode scalar count of `text` with each URL collapsed to one character.
std::int64_t effective_length(std::string_view text);

/// Unicode scalar count of the raw text.
std::int64_t char_count(std::string_view text);

/// Builds a note record with urls / effective_length / over_budget / no_url
/// derived from the text, so the stored fields can never drift from it.
SynthesizedNote make_synthesized_note(std::string tweet_id, std::string text, Method method,
                                       std::optional<std::string> model_id,
                                       TimestampMillis created_at,
                                       const UrlNormalizationPolicy& policy);

} // namespace gitsearch
