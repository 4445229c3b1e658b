#pragma once

#include <stdexcept>
#include <string>

namespace gitsearch {

/// Base class for all recoverable pipeline errors.
class Error : public std::runtime_error {
public:
    explicit Error(std::string message) : std::runtime_error(std::move(message)) {}
};

// ---- domain ----------------------------------------------------------------

struct ZeroRatings : Error {
    ZeroRatings() : Error("note has zero helpful and zero not-helpful ratings") {}
};

struct InvalidRecord : Error {
    explicit InvalidRecord(const std::string& what) : Error("invalid record: " + what) {}
};

// ---- gateway ---------------------------------------------------------------

struct TransportError : Error {
    explicit TransportError(const std::string& what) : Error("transport: " + what) {}
};

struct RateLimited : Error {
    explicit RateLimited(const std::string& what) : Error("rate limited: " + what) {}
};

struct MalformedResponse : Error {
    explicit MalformedResponse(const std::string& what) : Error("malformed response: " + what) {}
};

struct CacheMiss : Error {
    std::string digest;
    explicit CacheMiss(std::string d) : Error("replay cache miss for digest " + d), digest(std::move(d)) {}
};

struct OfflineMode : Error {
    OfflineMode() : Error("gateway is offline; completions are disabled") {}
};

// ---- structured-output parsing ----------------------------------------------

struct NoArrayFound : Error {
    NoArrayFound() : Error("no well-formed JSON array found in model output") {}
};

struct NoObjectFound : Error {
    NoObjectFound() : Error("no well-formed JSON object found in model output") {}
};

struct InvalidGapType : Error {
    std::string token;
    std::size_t index;
    InvalidGapType(std::string t, std::size_t i)
        : Error("invalid gap_type \"" + t + "\" at element " + std::to_string(i)),
          token(std::move(t)), index(i) {}
};

struct PriorityOutOfRange : Error {
    double value;
    std::size_t index;
    PriorityOutOfRange(double v, std::size_t i)
        : Error("priority " + std::to_string(v) + " out of range [1,5] at element " + std::to_string(i)),
          value(v), index(i) {}
};

struct MissingField : Error {
    std::string field;
    std::size_t index;
    explicit MissingField(std::string f, std::size_t i = 0)
        : Error("missing or empty field \"" + f + "\" at element " + std::to_string(i)),
          field(std::move(f)), index(i) {}
};

struct ScoreOutOfRange : Error {
    std::string field;
    long long value;
    ScoreOutOfRange(std::string f, long long v)
        : Error("score field \"" + f + "\" = " + std::to_string(v) + " outside [1,5]"),
          field(std::move(f)), value(v) {}
};

// ---- gap analysis / evidence search -----------------------------------------

struct EmptyGapsOnColdStart : Error {
    EmptyGapsOnColdStart() : Error("model produced no gaps for a tweet without notes") {}
};

struct EmptyGapReport : Error {
    EmptyGapReport() : Error("gap report has no gaps; cannot build search prompt") {}
};

struct EmptyArticle : Error {
    EmptyArticle() : Error("search backend returned a blank article") {}
};

// ---- synthesis / baselines ---------------------------------------------------

struct BlankNote : Error {
    BlankNote() : Error("note text is null or blank after trimming") {}
};

struct ColdStart : Error {
    explicit ColdStart(const std::string& tweet_id)
        : Error("no candidate notes available for tweet " + tweet_id) {}
};

// ---- metrics / judge ----------------------------------------------------------

struct MissingReference : Error {
    std::string tweet_id;
    explicit MissingReference(std::string id)
        : Error("no reference note for tweet " + id), tweet_id(std::move(id)) {}
};

struct NotHelpfulReference : Error {
    NotHelpfulReference() : Error("reference note is not rated helpful") {}
};

struct MisalignedInputs : Error {
    explicit MisalignedInputs(const std::string& what) : Error("misaligned inputs: " + what) {}
};

struct InsufficientData : Error {
    explicit InsufficientData(const std::string& what) : Error("insufficient data: " + what) {}
};

struct DuplicateRank : Error {
    explicit DuplicateRank(const std::string& what) : Error("duplicate rank: " + what) {}
};

struct UnknownMethod : Error {
    explicit UnknownMethod(const std::string& token) : Error("unknown method tag \"" + token + "\"") {}
};

// ---- curation -----------------------------------------------------------------

struct MissingColumn : Error {
    explicit MissingColumn(const std::string& column) : Error("missing column \"" + column + "\"") {}
};

struct ClassifierUnavailable : Error {
    explicit ClassifierUnavailable(const std::string& what) : Error("classifier unavailable: " + what) {}
};

struct NoHelpfulNotes : Error {
    NoHelpfulNotes() : Error("corpus has no tweet with a helpful note; cannot split") {}
};

struct LengthMismatch : Error {
    LengthMismatch(std::size_t a, std::size_t b)
        : Error("length mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

// ---- cli ------------------------------------------------------------------------

struct ConfigInvalid : Error {
    explicit ConfigInvalid(const std::string& what) : Error("config invalid: " + what) {}
};

struct StageMissing : Error {
    explicit StageMissing(const std::string& what) : Error("required stage output missing: " + what) {}
};

} // namespace gitsearch
