#include <doctest.h>

#include "gitsearch/evidence_search.hpp"
#include "gitsearch/prompts.hpp"
#include "support.hpp"

using namespace gitsearch;
using gitsearch::testing::make_note;
using gitsearch::testing::make_tweet;
using gitsearch::testing::ScriptedTransport;

namespace {

GapReport make_report(std::string tweet_id, std::vector<Gap> gaps) {
    GapReport report;
    report.tweet_id = std::move(tweet_id);
    report.gaps = std::move(gaps);
    report.model_id = "m1";
    return report;
}

Gap make_gap(GapType type, int priority, std::string description, std::string query) {
    Gap gap;
    gap.gap_type = type;
    gap.priority = priority;
    gap.description = std::move(description);
    gap.suggested_query = std::move(query);
    return gap;
}

Gateway live_gateway(std::shared_ptr<ScriptedTransport> transport) {
    RetryPolicy retry;
    retry.sleep_fn = [](std::int64_t) {};
    return Gateway(GatewayMode::LIVE, {}, std::move(transport), {}, retry);
}

} // namespace

TEST_CASE("search prompt lists gaps in priority-descending order") {
    const auto report = make_report(
        "t1", {make_gap(GapType::VAGUE_REFERENCE, 2, "low", "q-low"),
               make_gap(GapType::UNSUBSTANTIATED_CLAIM, 5, "high", "q-high")});
    const SearchPromptContext ctx{make_tweet("t1", "text"), {}, report};
    const PromptRequest request = build_search_prompt(ctx, "m2");

    CHECK(request.wants_search);
    const auto slots = prompts::parse_quoted_slots(request.user_text);
    REQUIRE(slots.size() == 3); // tweet, notes, gap block
    CHECK(slots[1] == "None");
    CHECK(slots[2] ==
          "UNSUBSTANTIATED_CLAIM | 5 | high | q-high\nVAGUE_REFERENCE | 2 | low | q-low");
}

TEST_CASE("search prompt renders a single gap as one line") {
    const auto report =
        make_report("t1", {make_gap(GapType::MISSING_CONTEXT, 3, "only", "q-only")});
    const SearchPromptContext ctx{make_tweet("t1", "text"), {}, report};
    const auto slots = prompts::parse_quoted_slots(build_search_prompt(ctx, "m2").user_text);
    REQUIRE(slots.size() == 3);
    CHECK(slots[2] == "MISSING_CONTEXT | 3 | only | q-only");
}

TEST_CASE("search prompt is a pure function of its context") {
    const auto report = make_report("t1", {make_gap(GapType::CONTRADICTION, 4, "d", "q")});
    const auto note = make_note("n1", "t1", "a note");
    const SearchPromptContext ctx{make_tweet("t1", "text"), {note}, report};
    CHECK(build_search_prompt(ctx, "m2").user_text == build_search_prompt(ctx, "m2").user_text);
}

TEST_CASE("prompt carries only context content") {
    const auto report = make_report("t1", {make_gap(GapType::CONTRADICTION, 4, "gap-desc", "gap-q")});
    const auto note = make_note("n1", "t1", "note-body");
    const SearchPromptContext ctx{make_tweet("t1", "tweet-body"), {note}, report};
    const std::string text = build_search_prompt(ctx, "m2").user_text;

    CHECK(text.find("tweet-body") != std::string::npos);
    CHECK(text.find("note-body") != std::string::npos);
    CHECK(text.find("gap-desc") != std::string::npos);
    // the rendered prompt equals the template with only the four slots filled
    const std::string reconstructed = prompts::replace_slots(
        prompts::targeted_search_template(),
        {{"[date]", format_date_utc(ctx.tweet.published_at)},
         {"[tweet_text]", "tweet-body"},
         {"[existing_notes]", "Note 1: note-body"},
         {"[gap_context]", "CONTRADICTION | 4 | gap-desc | gap-q"}});
    CHECK(text == reconstructed);
}

TEST_CASE("empty gap report cannot drive a search") {
    const SearchPromptContext ctx{make_tweet("t1", "text"), {}, make_report("t1", {})};
    CHECK_THROWS_AS(build_search_prompt(ctx, "m2"), EmptyGapReport);
}

TEST_CASE("retrieve_evidence merges inline and provider URLs") {
    auto transport = std::make_shared<ScriptedTransport>();
    transport->reply_always(
        {"Article body citing https://a.org/1 and https://b.org/2 plus https://c.org/3.",
         {"https://d.org/4"}});
    Gateway gateway = live_gateway(transport);

    const auto report = make_report("t1", {make_gap(GapType::MISSING_COVERAGE, 5, "d", "q")});
    const SearchPromptContext ctx{make_tweet("t1", "text"), {}, report};
    const EvidenceArticle article = retrieve_evidence(ctx, gateway, "m2", {}, 7);

    REQUIRE(article.cited_urls.size() == 4);
    CHECK(article.cited_urls[0] == "https://a.org/1");
    CHECK(article.cited_urls[3] == "https://d.org/4");
    CHECK(article.searched_at == 7);
    CHECK(article.tweet_id == "t1");
}

TEST_CASE("provider duplicates differing by tracking params collapse") {
    auto transport = std::make_shared<ScriptedTransport>();
    transport->reply_always(
        {"Body with https://a.org/page inline.", {"https://a.org/page?utm_source=provider"}});
    Gateway gateway = live_gateway(transport);

    const auto report = make_report("t1", {make_gap(GapType::SOURCE_VERIFICATION, 3, "d", "q")});
    const EvidenceArticle article =
        retrieve_evidence({make_tweet("t1", "text"), {}, report}, gateway, "m2", {}, 0);
    CHECK(article.cited_urls == std::vector<std::string>{"https://a.org/page"});
}

TEST_CASE("blank completion is an empty article") {
    auto transport = std::make_shared<ScriptedTransport>();
    transport->reply_always({"  \n ", {"https://a.org"}});
    Gateway gateway = live_gateway(transport);

    const auto report = make_report("t1", {make_gap(GapType::CONTRADICTION, 3, "d", "q")});
    CHECK_THROWS_AS(retrieve_evidence({make_tweet("t1", "text"), {}, report}, gateway, "m2", {}, 0),
                    EmptyArticle);
}

TEST_CASE("gap report for another tweet is rejected") {
    const auto report = make_report("other", {make_gap(GapType::CONTRADICTION, 3, "d", "q")});
    const SearchPromptContext ctx{make_tweet("t1", "text"), {}, report};
    CHECK_THROWS_AS(ctx.validate(), InvalidRecord);
}
