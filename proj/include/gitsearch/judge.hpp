#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gitsearch/domain.hpp"
#include "gitsearch/gateway.hpp"

namespace gitsearch {

/// The five scoring dimensions, in rubric order.
inline constexpr std::array<std::string_view, 5> kJudgeDimensions{
    "functional_errors", "claim_alignment", "fact_alignment", "completeness", "helpfulness"};

struct JudgeScores {
    int functional_errors = 1;
    int claim_alignment = 1;
    int fact_alignment = 1;
    int completeness = 1;
    int helpfulness = 1;
    std::string overall_comment;

    int dimension(std::string_view name) const;
    bool operator==(const JudgeScores&) const = default;
};

enum class Stars { NONE, ONE, TWO, THREE };

std::string_view to_string(Stars stars);

/// Threshold bands: * p<0.05, ** p<0.01, *** p<0.001.
Stars stars_for_p_value(double p);

struct DeltaReport {
    std::string dimension;
    std::size_t n_a = 0;
    std::size_t n_b = 0;
    double mean_a = 0.0;
    double mean_b = 0.0;
    double delta = 0.0;
    double p_value = 1.0;
    Stars stars = Stars::NONE;
};

struct WinRateMatrix {
    std::vector<Method> methods;
    // cells[i][j]: fraction of comparisons where methods[i] ranked above
    // methods[j]; defined only where n_comparisons[i][j] > 0.
    std::vector<std::vector<std::optional<double>>> cells;
    std::vector<std::vector<std::int64_t>> n_comparisons;
};

/// One annotator ranking for one tweet: rank 1 is the most useful note.
struct MethodRanking {
    std::string tweet_id;
    std::vector<std::pair<Method, int>> ranks;
};

/// Renders the five-dimension rubric prompt. The reference must be a note in
/// the helpful state; no search capability is requested.
PromptRequest build_judge_prompt(const Tweet& tweet, const CommunityNote& human_note,
                                 const SynthesizedNote& ai_note, const std::string& model_id);

/// Extracts and bounds-checks the first JSON object in model output.
/// Throws NoObjectFound / MissingField / ScoreOutOfRange.
JudgeScores parse_judge_response(const std::string& raw);

/// Judges one note with a single format-reminder re-ask on parse failure.
JudgeScores judge_note(const Tweet& tweet, const CommunityNote& human_note,
                       const SynthesizedNote& ai_note, Gateway& backend,
                       const std::string& model_id);

/// Per-dimension means, delta (a − b), two-sided Welch p-value, and stars for
/// two per-tweet aligned score sets. The tweet sets must coincide and contain
/// at least two tweets each.
std::vector<DeltaReport> compare_systems(const std::map<std::string, JudgeScores>& scores_a,
                                         const std::map<std::string, JudgeScores>& scores_b);

/// Pairwise win rates from strict per-tweet rankings; a tweet contributes to
/// a method pair only when both methods were ranked for it.
WinRateMatrix win_rate_matrix(const std::vector<MethodRanking>& rankings);

/// Two-sided Welch's t-test p-value for the difference of means.
double welch_p_value(const std::vector<double>& a, const std::vector<double>& b);

} // namespace gitsearch
