#include <doctest.h>

#include <set>

#include "gitsearch/gap_analysis.hpp"
#include "gitsearch/jsonl.hpp"
#include "gitsearch/prompts.hpp"
#include "gap_gen.hpp"
#include "support.hpp"

using namespace gitsearch;
using gitsearch::testing::make_note;
using gitsearch::testing::make_tweet;
using gitsearch::testing::ScriptedTransport;

namespace {

Gateway live_gateway(std::shared_ptr<ScriptedTransport> transport) {
    RetryPolicy retry;
    retry.sleep_fn = [](std::int64_t) {};
    return Gateway(GatewayMode::LIVE, {}, std::move(transport), {}, retry);
}

} // namespace

TEST_CASE("gap prompt renders the no-notes sentinel and the taxonomy") {
    const GapPromptContext ctx{make_tweet("t1", "Crime is up 50%"), {}};
    const PromptRequest request = build_gap_prompt(ctx, "m1");

    CHECK(request.model_id == "m1");
    CHECK_FALSE(request.wants_search);
    CHECK(request.user_text.find("\"\"\"None\"\"\"") != std::string::npos);
    for (const GapType type : all_gap_types()) {
        CHECK(request.user_text.find(std::string(to_string(type)) + ":") != std::string::npos);
    }
    CHECK(request.user_text.find("(published on 2025-09-01)") != std::string::npos);
}

TEST_CASE("gap prompt numbers notes chronologically") {
    const auto late = make_note("n2", "t1", "второй note", NoteStatus::NMR, 0, 0, 2000);
    const auto early = make_note("n1", "t1", "first note", NoteStatus::NMR, 0, 0, 1000);
    const GapPromptContext ctx{make_tweet("t1", "text"), {late, early}};
    const PromptRequest request = build_gap_prompt(ctx, "m1");

    const auto pos1 = request.user_text.find("Note 1: first note");
    const auto pos2 = request.user_text.find("Note 2: второй note");
    REQUIRE(pos1 != std::string::npos);
    REQUIRE(pos2 != std::string::npos);
    CHECK(pos1 < pos2);
}

TEST_CASE("template delimiters inside the tweet are escaped") {
    const std::string evil = "quote bomb \"\"\" here \"\"\"\" end";
    const GapPromptContext ctx{make_tweet("t1", evil), {}};
    const PromptRequest request = build_gap_prompt(ctx, "m1");

    const auto slots = prompts::parse_quoted_slots(request.user_text);
    REQUIRE(slots.size() == 2); // tweet + notes
    CHECK(slots[1] == "None");
    CHECK(slots[0].find("quote bomb") != std::string::npos);
    // the structure survived: no raw triple-quote run inside the slot content
    CHECK(slots[0].find("\"\"\"") == std::string::npos);
}

TEST_CASE("mismatched candidate notes are rejected") {
    const GapPromptContext ctx{make_tweet("t1", "text"), {make_note("n1", "other", "x")}};
    CHECK_THROWS_AS(ctx.validate(), InvalidRecord);
}

TEST_CASE("parse_gap_response decodes, validates, and locates arrays") {
    SUBCASE("direct decode") {
        const auto gaps = parse_gap_response(
            R"([{"gap_type":"CONTRADICTION","description":"d","priority":5,"suggested_query":"q"}])");
        REQUIRE(gaps.size() == 1);
        CHECK(gaps[0].gap_type == GapType::CONTRADICTION);
        CHECK(gaps[0].priority == 5);
    }
    SUBCASE("taxonomy is a closed set") {
        CHECK_THROWS_AS(parse_gap_response(
                            R"([{"gap_type":"LIE","description":"d","priority":3,"suggested_query":"q"}])"),
                        InvalidGapType);
    }
    SUBCASE("prose wrapping is ignored") {
        const std::string array =
            R"([{"gap_type":"MISSING_CONTEXT","description":"d","priority":2,"suggested_query":"q"}])";
        const auto direct = parse_gap_response(array);
        const auto wrapped = parse_gap_response("Sure! Here you go: " + array + " hope that helps");
        CHECK(direct == wrapped);
    }
    SUBCASE("error payloads carry the element index") {
        try {
            parse_gap_response(
                R"([{"gap_type":"CONTRADICTION","description":"d","priority":5,"suggested_query":"q"},
                    {"gap_type":"CONTRADICTION","description":"d","priority":9,"suggested_query":"q"}])");
            FAIL("expected PriorityOutOfRange");
        } catch (const PriorityOutOfRange& e) {
            CHECK(e.index == 1);
            CHECK(e.value == 9);
        }
    }
    SUBCASE("no array at all") {
        CHECK_THROWS_AS(parse_gap_response("I could not find any gaps."), NoArrayFound);
        CHECK_THROWS_AS(parse_gap_response("broken [ {\"gap_type\":"), NoArrayFound);
    }
    SUBCASE("non-integer priority is rejected") {
        CHECK_THROWS_AS(parse_gap_response(
                            R"([{"gap_type":"CONTRADICTION","description":"d","priority":3.5,"suggested_query":"q"}])"),
                        PriorityOutOfRange);
    }
    SUBCASE("empty description is missing") {
        CHECK_THROWS_AS(parse_gap_response(
                            R"([{"gap_type":"CONTRADICTION","description":"  ","priority":3,"suggested_query":"q"}])"),
                        MissingField);
    }
}

TEST_CASE("serialize then parse is identity on generated gap arrays") {
    std::mt19937 rng(20240817);
    for (int trial = 0; trial < 300; ++trial) {
        const std::vector<Gap> gaps = gitsearch::testing::random_gap_array(rng);
        CHECK(parse_gap_response(serialize_gaps(gaps)) == gaps);
    }
}

TEST_CASE("invalid mutations are rejected with the matching error") {
    std::mt19937 rng(7);
    const std::vector<Gap> gaps = gitsearch::testing::random_gap_array(rng);
    const std::size_t index = gaps.size() - 1;
    using gitsearch::testing::GapDefect;
    using gitsearch::testing::mutate_gap_array;

    CHECK_THROWS_AS(parse_gap_response(mutate_gap_array(gaps, index, GapDefect::BAD_TYPE)),
                    InvalidGapType);
    CHECK_THROWS_AS(parse_gap_response(mutate_gap_array(gaps, index, GapDefect::PRIORITY_ZERO)),
                    PriorityOutOfRange);
    CHECK_THROWS_AS(parse_gap_response(mutate_gap_array(gaps, index, GapDefect::PRIORITY_SIX)),
                    PriorityOutOfRange);
    CHECK_THROWS_AS(parse_gap_response(mutate_gap_array(gaps, index, GapDefect::DROP_DESCRIPTION)),
                    MissingField);
    CHECK_THROWS_AS(parse_gap_response(mutate_gap_array(gaps, index, GapDefect::DROP_QUERY)),
                    MissingField);
}

TEST_CASE("detect_gaps sorts by priority with stable ties") {
    auto transport = std::make_shared<ScriptedTransport>();
    transport->reply_always(
        {R"([{"gap_type":"VAGUE_REFERENCE","description":"g1","priority":3,"suggested_query":"q1"},
             {"gap_type":"CONTRADICTION","description":"g2","priority":5,"suggested_query":"q2"},
             {"gap_type":"MISSING_CONTEXT","description":"g3","priority":5,"suggested_query":"q3"}])",
         {}});
    Gateway gateway = live_gateway(transport);

    const GapReport report = detect_gaps({make_tweet("t1", "text"), {}}, gateway, "m1", 42);
    REQUIRE(report.gaps.size() == 3);
    CHECK(report.gaps[0].description == "g2");
    CHECK(report.gaps[1].description == "g3");
    CHECK(report.gaps[2].description == "g1");
    CHECK(report.tweet_id == "t1");
    CHECK(report.created_at == 42);
    CHECK_FALSE(report.raw_output.empty());
}

TEST_CASE("cold start with an empty gap list twice is an error") {
    auto transport = std::make_shared<ScriptedTransport>();
    transport->reply_always({"[]", {}});
    Gateway gateway = live_gateway(transport);

    CHECK_THROWS_AS(detect_gaps({make_tweet("t1", "text"), {}}, gateway, "m1", 0),
                    EmptyGapsOnColdStart);
    CHECK(transport->calls == 2); // the re-ask happened
}

TEST_CASE("warm start tolerates an empty gap list") {
    auto transport = std::make_shared<ScriptedTransport>();
    transport->reply_always({"[]", {}});
    Gateway gateway = live_gateway(transport);

    const auto note = make_note("n1", "t1", "note");
    const GapReport report = detect_gaps({make_tweet("t1", "text"), {note}}, gateway, "m1", 0);
    CHECK(report.gaps.empty());
    CHECK(transport->calls == 1);
}

TEST_CASE("one re-ask recovers from malformed output") {
    auto transport = std::make_shared<ScriptedTransport>();
    transport->reply_contains(
        "REMINDER",
        {R"([{"gap_type":"SOURCE_VERIFICATION","description":"d","priority":4,"suggested_query":"q"}])",
         {}});
    transport->reply_always({"definitely not json", {}});
    Gateway gateway = live_gateway(transport);

    const GapReport report = detect_gaps({make_tweet("t1", "text"), {}}, gateway, "m1", 0);
    REQUIRE(report.gaps.size() == 1);
    CHECK(report.gaps[0].gap_type == GapType::SOURCE_VERIFICATION);
    CHECK(transport->calls == 2);
}

TEST_CASE("one gap of each taxonomy type survives the round trip") {
    std::string array = "[";
    for (std::size_t i = 0; i < all_gap_types().size(); ++i) {
        if (i > 0) array += ",";
        array += R"({"gap_type":")" + std::string(to_string(all_gap_types()[i])) +
                 R"(","description":"d","priority":)" + std::to_string((i % 5) + 1) +
                 R"(,"suggested_query":"q"})";
    }
    array += "]";
    auto transport = std::make_shared<ScriptedTransport>();
    transport->reply_always({array, {}});
    Gateway gateway = live_gateway(transport);

    const GapReport report = detect_gaps({make_tweet("t1", "text"), {}}, gateway, "m1", 0);
    REQUIRE(report.gaps.size() == all_gap_types().size());
    std::set<GapType> seen;
    for (const Gap& gap : report.gaps) seen.insert(gap.gap_type);
    CHECK(seen.size() == all_gap_types().size());
}
