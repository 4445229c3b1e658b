#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gitsearch/domain.hpp"

namespace gitsearch {

// ---- input schemas -----------------------------------------------------------

/// Column names for the public note dump files and the locally collected
/// tweet file. Defaults follow the published dump layout; override any field
/// in the run config when a dump revision renames columns.
struct SchemaMap {
    struct Notes {
        std::string note_id = "noteId";
        std::string tweet_id = "tweetId";
        std::string text = "summary";
        std::string created_at_millis = "createdAtMillis";
        std::string author_id = "noteAuthorParticipantId"; // optional column
        std::string media_flag = "isMediaNote";             // optional column
    } notes;
    struct Status {
        std::string note_id = "noteId";
        std::string status = "currentStatus";
        std::string timestamp_millis = "timestampMillisOfCurrentStatus";
    } status;
    struct Ratings {
        std::string note_id = "noteId";
        std::string helpfulness = "helpfulnessLevel";
    } ratings;
    struct Tweets {
        std::string tweet_id = "tweetId";
        std::string text = "text";
        std::string created_at = "createdAt";
        std::string language = "lang";     // optional column
        std::string author_id = "authorId"; // optional column
    } tweets;
};

/// One parsed TSV row addressed by logical field through the schema map.
struct RawNoteRow {
    std::vector<std::string> values;
    const std::vector<std::string>* header = nullptr;

    std::optional<std::string> get(const std::string& column) const;
};

// ---- corpus -------------------------------------------------------------------

struct CorpusEntry {
    Tweet tweet;
    std::vector<CommunityNote> notes;
};

struct Corpus {
    std::vector<CorpusEntry> entries;
    // notes whose tweet join failed (deleted/unavailable tweets)
    std::vector<CommunityNote> orphan_notes;
    std::int64_t rejected_rows = 0;
};

using RejectSink =
    std::function<void(const std::string& file, std::size_t line_no, const std::string& line,
                       const std::string& why)>;

/// Joins the note, status-history, ratings, and tweet files into a corpus.
/// Status comes from the chronologically last history row (default NMR);
/// rating counts are aggregated per note. Tweets with zero notes are dropped;
/// malformed rows go to the reject sink and the run continues.
Corpus ingest(const std::filesystem::path& notes_path, const std::filesystem::path& status_path,
              const std::filesystem::path& ratings_path, const std::filesystem::path& tweets_path,
              const SchemaMap& schema, const RejectSink& reject = {});

// ---- topical filtering -----------------------------------------------------------

/// Case-insensitive phrase match at word boundaries.
bool keyword_filter(const std::string& note_text, const std::vector<std::string>& keywords);

/// Scores text for topical relevance; implementations may call a zero-shot
/// classifier service or replay recorded scores.
class ClassifierClient {
public:
    virtual ~ClassifierClient() = default;
    virtual double score(const std::string& text) = 0;
};

/// Replays scores recorded as JSONL {"text": ..., "score": ...}.
class TapeClassifier : public ClassifierClient {
public:
    explicit TapeClassifier(const std::filesystem::path& path);
    double score(const std::string& text) override;

private:
    std::map<std::string, double> scores_;
};

/// POSTs {"text": ...} to an HTTP endpoint returning {"score": ...}.
class HttpClassifier : public ClassifierClient {
public:
    explicit HttpClassifier(std::string base_url);
    double score(const std::string& text) override;

private:
    std::string base_url_;
};

/// True when the classifier entailment score reaches the threshold
/// (inclusive).
bool zero_shot_filter(const std::string& note_text, ClassifierClient& classifier, double threshold);

/// Union of the keyword and zero-shot filters.
bool hybrid_filter(const std::string& note_text, const std::vector<std::string>& keywords,
                   ClassifierClient& classifier, double threshold);

/// One phrase per line; '#' starts a comment; blank lines ignored.
std::vector<std::string> load_keywords(const std::filesystem::path& path);

// ---- exclusions --------------------------------------------------------------------

enum class ExclusionReason { MEDIA, LANGUAGE, DATE };

std::string_view to_string(ExclusionReason reason);

using EnglishDetector = std::function<bool(const Tweet&)>;

/// Keeps tweets tagged "en"/"en-*"; tweets without a language tag pass.
bool default_english_detector(const Tweet& tweet);

struct ExclusionOutcome {
    Corpus kept;
    std::vector<std::pair<std::string, ExclusionReason>> excluded; // tweet_id → reason
    std::int64_t excluded_media = 0;
    std::int64_t excluded_language = 0;
    std::int64_t excluded_date = 0;
};

/// Removes media-dependent, non-English, and pre-cutoff tweets. Rules apply
/// in that fixed order and each excluded tweet carries exactly one reason.
ExclusionOutcome apply_exclusions(const Corpus& corpus, const EnglishDetector& english,
                                  TimestampMillis cutoff);

// ---- split ---------------------------------------------------------------------------

struct SplitResult {
    std::vector<CorpusEntry> train_pool;
    std::vector<CorpusEntry> test_set;
    std::int64_t eligible = 0;       // tweets with at least one helpful note
    std::int64_t test_with_nmr = 0;  // test tweets that also carry candidate notes
};

/// The most recent ceil(fraction * n) tweets among those with a helpful note
/// form the test set; timestamp ties break by ascending tweet_id.
SplitResult temporal_test_split(const Corpus& corpus, double fraction);

// ---- statistics -----------------------------------------------------------------------

struct DescriptiveStats {
    std::int64_t n_tweets = 0;
    std::int64_t n_notes = 0;
    double pct_crh = 0.0;
    double pct_crnh = 0.0;
    double pct_nmr = 0.0;
    std::optional<double> median_notes_per_contributor;
    std::optional<double> contributor_iqr_low;
    std::optional<double> contributor_iqr_high;
    double note_length_words_mean = 0.0;
    double note_length_words_sd = 0.0;
    double pct_notes_citing = 0.0;
    double pct_notes_without_citation = 0.0;
    std::vector<std::pair<std::string, double>> top_domains; // share of all citations
    std::optional<double> median_tweet_to_first_note_ms;
    std::optional<double> median_note_to_resolution_ms;
    double pct_deleted_tweets = 0.0;
};

/// Note length in words with URLs removed first.
std::int64_t note_word_count(const std::string& text);

DescriptiveStats descriptive_stats(const Corpus& corpus, const UrlNormalizationPolicy& policy = {});

/// Linear-interpolation quantile over a sorted copy of `values`.
double quantile(std::vector<double> values, double q);

// ---- curation report ----------------------------------------------------------------

struct CurationReport {
    std::int64_t tweets_ingested = 0;
    std::int64_t notes_ingested = 0;
    std::int64_t rejected_rows = 0;
    std::int64_t tweets_matched_classifier = 0;
    std::int64_t tweets_matched_keywords = 0;
    std::int64_t tweets_matched_union = 0;
    std::int64_t excluded_media = 0;
    std::int64_t excluded_language = 0;
    std::int64_t excluded_date = 0;
    std::int64_t tweets_final = 0;
    std::int64_t notes_final = 0;
    DescriptiveStats stats;
};

// ---- filter quality ---------------------------------------------------------------------

struct FilterQuality {
    double us_precision = 0.0;
    double us_recall = 0.0;
    double us_f1 = 0.0;
    double other_precision = 0.0;
    double other_recall = 0.0;
    double other_f1 = 0.0;
    double macro_f1 = 0.0;
};

/// Per-class precision/recall/F1 and macro-F1 over a labeled sample;
/// true = US politics, false = other.
FilterQuality filter_quality(const std::vector<bool>& predictions, const std::vector<bool>& labels);

} // namespace gitsearch
