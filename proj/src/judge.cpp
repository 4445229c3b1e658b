#include "gitsearch/judge.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <boost/math/distributions/students_t.hpp>

#include "gitsearch/jsonl.hpp"
#include "gitsearch/prompts.hpp"

namespace gitsearch {

int JudgeScores::dimension(std::string_view name) const {
    if (name == "functional_errors") return functional_errors;
    if (name == "claim_alignment") return claim_alignment;
    if (name == "fact_alignment") return fact_alignment;
    if (name == "completeness") return completeness;
    if (name == "helpfulness") return helpfulness;
    throw Error("unknown judge dimension: " + std::string(name));
}

std::string_view to_string(Stars stars) {
    switch (stars) {
        case Stars::NONE: return "";
        case Stars::ONE: return "*";
        case Stars::TWO: return "**";
        case Stars::THREE: return "***";
    }
    return "";
}

Stars stars_for_p_value(double p) {
    if (p < 0.001) return Stars::THREE;
    if (p < 0.01) return Stars::TWO;
    if (p < 0.05) return Stars::ONE;
    return Stars::NONE;
}

PromptRequest build_judge_prompt(const Tweet& tweet, const CommunityNote& human_note,
                                 const SynthesizedNote& ai_note, const std::string& model_id) {
    if (human_note.status != NoteStatus::CRH) throw NotHelpfulReference();

    PromptRequest request;
    request.model_id = model_id;
    request.user_text = prompts::replace_slots(
        prompts::judge_template(), {{"[date]", format_date_utc(tweet.published_at)},
                                    {"[tweet_text]", prompts::escape_slot(tweet.text)},
                                    {"[human_note]", prompts::escape_slot(human_note.text)},
                                    {"[ai_note]", prompts::escape_slot(ai_note.text)}});
    request.wants_search = false;
    request.temperature_policy = TemperaturePolicy::DETERMINISTIC;
    return request;
}

JudgeScores parse_judge_response(const std::string& raw) {
    const std::optional<Json> object = first_json_object(raw);
    if (!object) throw NoObjectFound();

    JudgeScores scores;
    const auto read_score = [&](std::string_view name) -> int {
        const std::string key(name);
        if (!object->contains(key)) throw MissingField(key);
        const Json& v = (*object)[key];
        if (!v.is_number_integer()) throw MissingField(key);
        const long long value = v.get<long long>();
        if (value < 1 || value > 5) throw ScoreOutOfRange(key, value);
        return static_cast<int>(value);
    };
    scores.functional_errors = read_score("functional_errors");
    scores.claim_alignment = read_score("claim_alignment");
    scores.fact_alignment = read_score("fact_alignment");
    scores.completeness = read_score("completeness");
    scores.helpfulness = read_score("helpfulness");
    scores.overall_comment = object->value("overall_comment", std::string{});
    return scores;
}

JudgeScores judge_note(const Tweet& tweet, const CommunityNote& human_note,
                       const SynthesizedNote& ai_note, Gateway& backend,
                       const std::string& model_id) {
    const PromptRequest request = build_judge_prompt(tweet, human_note, ai_note, model_id);
    const CompletionResult completion = backend.complete(request);
    try {
        return parse_judge_response(completion.text);
    } catch (const Error&) {
        PromptRequest retry = request;
        retry.user_text +=
            "\n\nREMINDER: Your previous reply could not be used. Return ONLY the JSON object "
            "with integer fields functional_errors, claim_alignment, fact_alignment, "
            "completeness, helpfulness (each 1-5) and a string overall_comment. No preamble.";
        return parse_judge_response(backend.complete(retry).text);
    }
}

double welch_p_value(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2) {
        throw InsufficientData("Welch's t-test needs at least two samples per group");
    }
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double mean_a = std::accumulate(a.begin(), a.end(), 0.0) / na;
    const double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / nb;

    double var_a = 0, var_b = 0;
    for (const double x : a) var_a += (x - mean_a) * (x - mean_a);
    for (const double x : b) var_b += (x - mean_b) * (x - mean_b);
    var_a /= na - 1;
    var_b /= nb - 1;

    const double se2 = var_a / na + var_b / nb;
    if (se2 <= 0.0) {
        return mean_a == mean_b ? 1.0 : 0.0; // zero variance in both groups
    }
    const double t = (mean_a - mean_b) / std::sqrt(se2);
    const double df = se2 * se2 / ((var_a / na) * (var_a / na) / (na - 1) +
                                   (var_b / nb) * (var_b / nb) / (nb - 1));
    const boost::math::students_t dist(df);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

std::vector<DeltaReport> compare_systems(const std::map<std::string, JudgeScores>& scores_a,
                                         const std::map<std::string, JudgeScores>& scores_b) {
    if (scores_a.size() != scores_b.size()) {
        throw MisalignedInputs("score sets cover " + std::to_string(scores_a.size()) + " vs " +
                               std::to_string(scores_b.size()) + " tweets");
    }
    for (const auto& [tweet_id, _] : scores_a) {
        if (!scores_b.count(tweet_id)) {
            throw MisalignedInputs("tweet " + tweet_id + " present in only one score set");
        }
    }
    if (scores_a.size() < 2) throw InsufficientData("need at least two aligned tweets");

    std::vector<DeltaReport> reports;
    for (const std::string_view dim : kJudgeDimensions) {
        std::vector<double> a, b;
        a.reserve(scores_a.size());
        b.reserve(scores_b.size());
        for (const auto& [tweet_id, s] : scores_a) {
            a.push_back(static_cast<double>(s.dimension(dim)));
            b.push_back(static_cast<double>(scores_b.at(tweet_id).dimension(dim)));
        }
        DeltaReport r;
        r.dimension = std::string(dim);
        r.n_a = a.size();
        r.n_b = b.size();
        r.mean_a = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(a.size());
        r.mean_b = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(b.size());
        r.delta = r.mean_a - r.mean_b;
        r.p_value = welch_p_value(a, b);
        r.stars = stars_for_p_value(r.p_value);
        reports.push_back(std::move(r));
    }
    return reports;
}

WinRateMatrix win_rate_matrix(const std::vector<MethodRanking>& rankings) {
    std::set<std::string> tags;
    for (const MethodRanking& ranking : rankings) {
        std::set<int> seen_ranks;
        std::set<std::string> seen_methods;
        for (const auto& [method, rank] : ranking.ranks) {
            if (!seen_ranks.insert(rank).second) {
                throw DuplicateRank("rank " + std::to_string(rank) + " duplicated for tweet " +
                                    ranking.tweet_id);
            }
            if (!seen_methods.insert(std::string(to_string(method))).second) {
                throw DuplicateRank("method " + std::string(to_string(method)) +
                                    " ranked twice for tweet " + ranking.tweet_id);
            }
            tags.insert(std::string(to_string(method)));
        }
    }

    WinRateMatrix matrix;
    for (const std::string& tag : tags) {
        matrix.methods.push_back(*parse_method(tag));
    }
    const std::size_t n = matrix.methods.size();
    matrix.cells.assign(n, std::vector<std::optional<double>>(n));
    matrix.n_comparisons.assign(n, std::vector<std::int64_t>(n, 0));

    std::vector<std::vector<std::int64_t>> wins(n, std::vector<std::int64_t>(n, 0));
    const auto index_of = [&](Method m) {
        const auto it = std::find(matrix.methods.begin(), matrix.methods.end(), m);
        return static_cast<std::size_t>(it - matrix.methods.begin());
    };

    for (const MethodRanking& ranking : rankings) {
        for (std::size_t i = 0; i < ranking.ranks.size(); ++i) {
            for (std::size_t j = i + 1; j < ranking.ranks.size(); ++j) {
                const auto& [mi, ri] = ranking.ranks[i];
                const auto& [mj, rj] = ranking.ranks[j];
                const std::size_t a = index_of(mi);
                const std::size_t b = index_of(mj);
                ++matrix.n_comparisons[a][b];
                ++matrix.n_comparisons[b][a];
                if (ri < rj) {
                    ++wins[a][b];
                } else {
                    ++wins[b][a];
                }
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && matrix.n_comparisons[i][j] > 0) {
                matrix.cells[i][j] = static_cast<double>(wins[i][j]) /
                                     static_cast<double>(matrix.n_comparisons[i][j]);
            }
        }
    }
    return matrix;
}

} // namespace gitsearch
