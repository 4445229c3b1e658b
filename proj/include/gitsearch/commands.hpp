#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gitsearch/curation.hpp"
#include "gitsearch/run_config.hpp"

namespace gitsearch {

inline constexpr std::string_view kVersion = "0.1.0";

/// Fixed run-directory artifact names.
namespace artifacts {
inline constexpr std::string_view kCorpus = "corpus.jsonl";
inline constexpr std::string_view kTestIds = "test_ids.txt";
inline constexpr std::string_view kCurationReport = "curation_report.json";
inline constexpr std::string_view kRejects = "rejects.tsv";
inline constexpr std::string_view kGaps = "gaps.jsonl";
inline constexpr std::string_view kArticles = "articles.jsonl";
inline constexpr std::string_view kNotes = "notes.jsonl";
inline constexpr std::string_view kPipeline = "pipeline.jsonl";
inline constexpr std::string_view kErrors = "errors.jsonl";
inline constexpr std::string_view kJudge = "judge.jsonl";
inline constexpr std::string_view kMetricsCsv = "metrics.csv";
inline constexpr std::string_view kSummaryCsv = "summary.csv";
inline constexpr std::string_view kDeltasCsv = "deltas.csv";
inline constexpr std::string_view kWinratesCsv = "winrates.csv";
inline constexpr std::string_view kReportJson = "report.json";
inline constexpr std::string_view kReportTxt = "report.txt";
inline constexpr std::string_view kTapesDir = "tapes";
} // namespace artifacts

struct CommandOutcome {
    int hard_failures = 0;
    int soft_failures = 0;
    std::int64_t items_done = 0;
    std::int64_t items_skipped = 0;

    int exit_code() const { return hard_failures > 0 ? 1 : 0; }
};

/// Ingests the note dumps, applies the hybrid topical filter and the
/// exclusion rules, and writes corpus.jsonl + curation_report.json +
/// rejects.tsv.
CommandOutcome cmd_curate(const RunConfig& config);

/// Writes the temporally stratified test membership to test_ids.txt.
CommandOutcome cmd_split(const RunConfig& config);

/// Runs the three-phase pipeline for the selected tweets, resuming past
/// completed ones.
CommandOutcome cmd_pipeline(const RunConfig& config, const std::vector<std::string>& tweet_ids = {});

/// Runs one baseline ("supernotes-lite" or "web-agent") for the selected
/// tweets.
CommandOutcome cmd_baseline(const RunConfig& config, const std::string& method_tag,
                            const std::vector<std::string>& tweet_ids = {});

/// Scores notes against helpful references; writes metrics.csv + summary.csv.
CommandOutcome cmd_metrics(const RunConfig& config, const std::filesystem::path& notes_path = {});

/// Judges notes on the five-dimension rubric; writes judge.jsonl + deltas.csv.
CommandOutcome cmd_judge(const RunConfig& config, const std::filesystem::path& notes_path = {});

/// Consolidated per-method table (+ win-rate matrix when rankings exist);
/// writes report.json + report.txt and winrates.csv.
CommandOutcome cmd_report(const RunConfig& config);

// ---- shared helpers (used by commands and tests) --------------------------------

/// Reads corpus.jsonl ({"tweet": ..., "notes": [...]} per line).
Corpus load_corpus(const std::filesystem::path& path);

void write_corpus(const Corpus& corpus, const std::filesystem::path& path,
                  const RunConfig& config, TimestampMillis now);

/// Reference map: per tweet, the helpful note with the most helpful ratings
/// (ties: earliest creation, then note_id).
std::map<std::string, CommunityNote> reference_notes(const Corpus& corpus);

/// Candidate notes for generation: the tweet's needs-more-ratings notes.
std::vector<CommunityNote> candidate_notes(const CorpusEntry& entry);

/// Wall clock in live/record mode; the epoch in replay/offline mode so replayed
/// artifacts are byte-stable.
TimestampMillis run_clock(const RunConfig& config);

} // namespace gitsearch
