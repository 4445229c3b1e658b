#include <doctest.h>

#include <fstream>

#include "gitsearch/jsonl.hpp"
#include "gitsearch/metrics.hpp"
#include "lcs_oracle.hpp"
#include "support.hpp"

using namespace gitsearch;
using gitsearch::testing::make_note;

TEST_CASE("tokenize lowercases, splits on non-alphanumerics, and shields URLs") {
    CHECK(tokenize("Trump's claim") == std::vector<std::string>{"trump", "s", "claim"});
    CHECK(tokenize("see https://a.org now") ==
          std::vector<std::string>{"see", "<url:https://a.org>", "now"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("Vote 2024! #election") == std::vector<std::string>{"vote", "2024", "election"});
}

TEST_CASE("rouge_l fixtures") {
    CHECK(rouge_l("identical words here", "identical words here") == doctest::Approx(1.0));
    CHECK(rouge_l("alpha beta gamma", "delta epsilon") == doctest::Approx(0.0));
    CHECK(rouge_l("", "reference") == doctest::Approx(0.0));
    // cand [a,b,c,d], ref [a,c,e]: LCS=2, P=1/2, R=2/3, F1=4/7
    CHECK(rouge_l("a b c d", "a c e") == doctest::Approx(4.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("rouge_l F1 is symmetric and reflexive") {
    const std::vector<std::string> texts{
        "the claim is false",
        "officials said the claim is misleading see https://a.org",
        "short",
        "numbers 1 2 3 only",
    };
    for (const std::string& a : texts) {
        CHECK(rouge_l(a, a) == doctest::Approx(1.0));
        for (const std::string& b : texts) {
            CHECK(rouge_l(a, b) == doctest::Approx(rouge_l(b, a)).epsilon(1e-15));
        }
    }
}

TEST_CASE("dynamic-programming LCS equals the brute-force oracle") {
    static const std::vector<std::string> kVocab{"a", "b", "c", "d", "e"};
    std::uniform_int_distribution<std::size_t> len(0, 10);
    std::uniform_int_distribution<std::size_t> sym(0, kVocab.size() - 1);
    auto& rng = gitsearch::testing::prng();

    for (int trial = 0; trial < 250; ++trial) {
        std::vector<std::string> a(len(rng)), b(len(rng));
        for (auto& t : a) t = kVocab[sym(rng)];
        for (auto& t : b) t = kVocab[sym(rng)];
        CHECK(lcs_length(a, b) == gitsearch::testing::lcs_brute_force(a, b));
    }
}

TEST_CASE("url_recall set arithmetic") {
    const UrlNormalizationPolicy policy;
    const auto candidate = [&](std::string text) {
        return make_synthesized_note("t1", std::move(text), Method::GITSEARCH, std::nullopt, 0,
                                     policy);
    };
    const auto reference = [&](std::string text) {
        return make_note("ref", "t1", std::move(text), NoteStatus::CRH, 5, 0);
    };

    CHECK(*url_recall(candidate("x https://a.org https://b.org"), reference("https://a.org"),
                      policy) == doctest::Approx(1.0));
    CHECK(*url_recall(candidate("no urls"), reference("https://a.org https://b.org"), policy) ==
          doctest::Approx(0.0));
    CHECK(*url_recall(candidate("x https://a.org https://b.org?utm_source=z"),
                      reference("https://a.org https://b.org"), policy) == doctest::Approx(1.0));
    CHECK_FALSE(url_recall(candidate("x https://a.org"), reference("no reference urls"), policy)
                    .has_value());
}

TEST_CASE("url_recall is monotone in the candidate URL set") {
    const UrlNormalizationPolicy policy;
    const auto reference = make_note("ref", "t1", "see https://a.org and https://b.org",
                                     NoteStatus::CRH, 5, 0);
    std::string text = "note";
    double previous = 0.0;
    for (const std::string& url :
         {"https://c.org", "https://a.org", "https://d.org", "https://b.org"}) {
        text += " " + url;
        const auto note = make_synthesized_note("t1", text, Method::GITSEARCH, std::nullopt, 0, policy);
        const double r = *url_recall(note, reference, policy);
        CHECK(r >= previous);
        previous = r;
    }
    CHECK(previous == doctest::Approx(1.0));
}

TEST_CASE("hand-computed fixture file") {
    std::ifstream in(std::filesystem::path(FIXTURE_DIR) / "metrics_cases.json");
    REQUIRE(in);
    const Json cases = Json::parse(in);
    const UrlNormalizationPolicy policy;

    for (const Json& c : cases) {
        INFO("case: ", c.at("name").get<std::string>());
        const std::string text = c.at("text").get<std::string>();
        const auto note =
            make_synthesized_note("t1", text, Method::GITSEARCH, std::nullopt, 0, policy);
        const auto reference =
            make_note("ref", "t1", c.at("ref_text").get<std::string>(), NoteStatus::CRH, 1, 0);

        CHECK(effective_length(text) == c.at("effective_length").get<std::int64_t>());
        CHECK(char_count(text) == c.at("char_count").get<std::int64_t>());
        CHECK(static_cast<std::int64_t>(note.urls.size()) == c.at("n_urls").get<std::int64_t>());
        const auto recall = url_recall(note, reference, policy);
        if (c.at("url_recall").is_null()) {
            CHECK_FALSE(recall.has_value());
        } else {
            REQUIRE(recall.has_value());
            CHECK(*recall == doctest::Approx(c.at("url_recall").get<double>()).epsilon(1e-12));
        }
    }
}

TEST_CASE("score_corpus aggregates per method") {
    const UrlNormalizationPolicy policy;
    std::map<std::string, CommunityNote> refs;
    refs.emplace("t1", make_note("r1", "t1", "claim one is false https://a.org", NoteStatus::CRH, 4, 0));
    refs.emplace("t2", make_note("r2", "t2", "claim two is false", NoteStatus::CRH, 4, 0));
    refs.emplace("t3", make_note("r3", "t3", "claim three is false https://c.org", NoteStatus::CRH, 4, 0));

    std::vector<SynthesizedNote> notes;
    notes.push_back(make_synthesized_note("t1", "claim one is false https://a.org",
                                          Method::GITSEARCH, std::nullopt, 0, policy));
    notes.push_back(make_synthesized_note("t2", "claim two is false", Method::GITSEARCH,
                                          std::nullopt, 0, policy));
    notes.push_back(make_synthesized_note("t3", "unrelated words entirely https://x.org",
                                          Method::WEB_AGENT, std::nullopt, 0, policy));

    const CorpusScores scores = score_corpus(notes, refs, policy);
    REQUIRE(scores.reports.size() == 3);
    // ordered by (tweet_id, method)
    CHECK(scores.reports[0].tweet_id == "t1");
    CHECK(scores.reports[0].rouge_l == doctest::Approx(1.0));
    CHECK(*scores.reports[0].url_recall == doctest::Approx(1.0));
    CHECK_FALSE(scores.reports[1].url_recall.has_value()); // t2 reference has no URL

    REQUIRE(scores.summary.size() == 2); // ordered by tag: GITSEARCH < WEB_AGENT
    CHECK(scores.summary[0].method == Method::GITSEARCH);
    CHECK(scores.summary[0].n_notes == 2);
    CHECK(scores.summary[0].rouge_l_mean == doctest::Approx(1.0));
    CHECK(scores.summary[0].url_recall_excluded == 1);
    CHECK(scores.summary[1].method == Method::WEB_AGENT);
    CHECK(scores.summary[1].n_notes == 1);
    CHECK(*scores.summary[1].url_recall_mean == doctest::Approx(0.0));

    SUBCASE("mean over three known values") {
        // rouge means: hand arithmetic on a fresh fixture
        std::map<std::string, CommunityNote> r2;
        r2.emplace("a", make_note("ra", "a", "one two three four", NoteStatus::CRH, 1, 0));
        r2.emplace("b", make_note("rb", "b", "one two three four", NoteStatus::CRH, 1, 0));
        r2.emplace("c", make_note("rc", "c", "one two three four", NoteStatus::CRH, 1, 0));
        std::vector<SynthesizedNote> n2;
        // LCS 4/4 -> F1 1.0 ; LCS 2 of cand 2 ref 4 -> P=1,R=.5,F1=2/3 ; disjoint -> 0
        n2.push_back(make_synthesized_note("a", "one two three four", Method::GITSEARCH, std::nullopt, 0, policy));
        n2.push_back(make_synthesized_note("b", "one two", Method::GITSEARCH, std::nullopt, 0, policy));
        n2.push_back(make_synthesized_note("c", "five six", Method::GITSEARCH, std::nullopt, 0, policy));
        const CorpusScores s2 = score_corpus(n2, r2, policy);
        REQUIRE(s2.summary.size() == 1);
        CHECK(s2.summary[0].rouge_l_mean ==
              doctest::Approx((1.0 + 2.0 / 3.0 + 0.0) / 3.0).epsilon(1e-12));
    }

    SUBCASE("missing reference is an error") {
        std::vector<SynthesizedNote> orphan;
        orphan.push_back(make_synthesized_note("unknown", "text", Method::GITSEARCH, std::nullopt,
                                               0, policy));
        CHECK_THROWS_AS(score_corpus(orphan, refs, policy), MissingReference);
    }
}
