#include <doctest.h>

#include "gitsearch/gap_analysis.hpp"
#include "gitsearch/note_synthesis.hpp"
#include "gitsearch/prompts.hpp"
#include "support.hpp"

using namespace gitsearch;
using gitsearch::testing::make_note;
using gitsearch::testing::make_tweet;
using gitsearch::testing::ScriptedTransport;
using gitsearch::testing::TempDir;

namespace {

EvidenceArticle make_article(std::string tweet_id, std::string body,
                             std::vector<std::string> urls) {
    EvidenceArticle article;
    article.tweet_id = std::move(tweet_id);
    article.body = std::move(body);
    article.cited_urls = std::move(urls);
    article.model_id = "m2";
    return article;
}

Gateway live_gateway(std::shared_ptr<ScriptedTransport> transport) {
    RetryPolicy retry;
    retry.sleep_fn = [](std::int64_t) {};
    return Gateway(GatewayMode::LIVE, {}, std::move(transport), {}, retry);
}

constexpr char kGapArray[] =
    R"([{"gap_type":"UNSUBSTANTIATED_CLAIM","description":"d","priority":5,"suggested_query":"q"}])";

} // namespace

TEST_CASE("synthesis prompt embeds the article and the budget rule") {
    const auto article = make_article("t1", "Article text citing https://a.org and https://b.org",
                                      {"https://a.org", "https://b.org"});
    const PromptRequest request = build_synthesis_prompt(make_tweet("t1", "text"), article, "m3");

    CHECK_FALSE(request.wants_search);
    CHECK(request.user_text.find("Treat each URL as 1 character") != std::string::npos);
    const auto slots = prompts::parse_quoted_slots(request.user_text);
    REQUIRE(slots.size() == 2);
    CHECK(slots[1] == article.body);
    // each article URL appears exactly once
    for (const std::string& url : article.cited_urls) {
        const std::size_t first = request.user_text.find(url);
        REQUIRE(first != std::string::npos);
        CHECK(request.user_text.find(url, first + 1) == std::string::npos);
    }
}

TEST_CASE("postprocess steps") {
    const UrlNormalizationPolicy policy;
    CHECK(postprocess("\"Claim is false. https://a.org?utm_source=openai\"", policy) ==
          "Claim is false. https://a.org");
    CHECK(postprocess("A &amp; B", policy) == "A & B");
    CHECK(postprocess("  plain note  ", policy) == "plain note");
    CHECK(postprocess("'quoted'", policy) == "quoted");
    CHECK(postprocess("“curly”", policy) == "curly");
    CHECK(postprocess("x &#38; y &#x26; z", policy) == "x & y & z");
    CHECK_THROWS_AS(postprocess("", policy), BlankNote);
    CHECK_THROWS_AS(postprocess("   \n ", policy), BlankNote);
    CHECK_THROWS_AS(postprocess("\"\"", policy), BlankNote);
}

TEST_CASE("postprocess is idempotent") {
    const UrlNormalizationPolicy policy;
    const std::vector<std::string> cases{
        "\"Claim is false. https://a.org?utm_source=openai\"",
        "''already quoted twice''",
        "A &amp;amp; B",
        "  \"wrapped &quot;inner&quot; text\"  ",
        "plain",
        "ends with url https://UPPER.org/Path?ref=1.",
        "&quot;note&quot;",
    };
    for (const std::string& text : cases) {
        const std::string once = postprocess(text, policy);
        CHECK(postprocess(once, policy) == once);
    }
}

TEST_CASE("synthesize_note computes lengths and flags") {
    std::string body(208, 'A');
    const std::string note_text = body + " https://a.org/1 https://b.org/2";
    auto transport = std::make_shared<ScriptedTransport>();
    transport->reply_always({note_text, {}});
    Gateway gateway = live_gateway(transport);

    const auto article = make_article(
        "t1", "evidence https://a.org/1 https://b.org/2", {"https://a.org/1", "https://b.org/2"});
    const SynthesizedNote note =
        synthesize_note(make_tweet("t1", "text"), article, gateway, "m3", {}, 5);

    CHECK(note.effective_length == 212);
    CHECK_FALSE(note.over_budget);
    CHECK(note.urls.size() == 2);
    CHECK(note.method == Method::GITSEARCH);
    CHECK_FALSE(note.hallucinated_url);
    CHECK_FALSE(note.no_url);
    CHECK(note.created_at == 5);
}

TEST_CASE("over-budget note is re-asked once then flagged") {
    const std::string too_long(300, 'B');
    auto transport = std::make_shared<ScriptedTransport>();
    transport->reply_always({too_long + " https://a.org", {}});
    Gateway gateway = live_gateway(transport);

    const auto article = make_article("t1", "evidence https://a.org", {"https://a.org"});
    const SynthesizedNote note =
        synthesize_note(make_tweet("t1", "text"), article, gateway, "m3", {}, 0);

    CHECK(note.over_budget);
    CHECK(note.effective_length == 302);
    CHECK(transport->calls == 2);
}

TEST_CASE("shorten re-ask can rescue the budget") {
    const std::string long_note = std::string(300, 'C') + " https://a.org";
    auto transport = std::make_shared<ScriptedTransport>();
    transport->reply_contains("280-character limit", {"Short note. https://a.org", {}});
    transport->reply_always({long_note, {}});
    Gateway gateway = live_gateway(transport);

    const auto article = make_article("t1", "evidence https://a.org", {"https://a.org"});
    const SynthesizedNote note =
        synthesize_note(make_tweet("t1", "text"), article, gateway, "m3", {}, 0);
    CHECK_FALSE(note.over_budget);
    CHECK(note.text == "Short note. https://a.org");
}

TEST_CASE("a URL outside the evidence sets the hallucination flag") {
    auto transport = std::make_shared<ScriptedTransport>();
    transport->reply_always({"Claim addressed. https://evil.example/unrelated", {}});
    Gateway gateway = live_gateway(transport);

    const auto article = make_article("t1", "evidence https://a.org", {"https://a.org"});
    const SynthesizedNote note =
        synthesize_note(make_tweet("t1", "text"), article, gateway, "m3", {}, 0);
    CHECK(note.hallucinated_url);

    // a note with no URL at all is flagged differently
    auto transport2 = std::make_shared<ScriptedTransport>();
    transport2->reply_always({"Just words, no link.", {}});
    Gateway gateway2 = live_gateway(transport2);
    const SynthesizedNote bare =
        synthesize_note(make_tweet("t1", "text"), article, gateway2, "m3", {}, 0);
    CHECK_FALSE(bare.hallucinated_url);
    CHECK(bare.no_url);
}

TEST_CASE("run_pipeline runs the three phases in order") {
    auto transport = std::make_shared<ScriptedTransport>();
    transport->reply_contains("return ONLY the JSON array", {kGapArray, {}});
    transport->reply_contains("Identified Gaps and Suggested Queries",
                              {"Evidence article. https://a.org/ev", {"https://b.org/extra"}});
    transport->reply_contains("fact-checking article. Your task",
                              {"Final note. https://a.org/ev", {}});
    Gateway gateway = live_gateway(transport);

    int gap_events = 0, article_events = 0, note_events = 0;
    PipelineSink sink;
    sink.on_gap_report = [&](const GapReport&) { ++gap_events; };
    sink.on_article = [&](const EvidenceArticle&) { ++article_events; };
    sink.on_note = [&](const SynthesizedNote&) { ++note_events; };

    const PipelineRecord record =
        run_pipeline(make_tweet("t1", "text"), {}, gateway, {"m1", "m2", "m3"}, {}, 0, sink);

    CHECK(record.ok);
    REQUIRE(record.gap_report);
    REQUIRE(record.article);
    REQUIRE(record.note);
    CHECK(record.article->cited_urls ==
          std::vector<std::string>{"https://a.org/ev", "https://b.org/extra"});
    CHECK(record.note->text == "Final note. https://a.org/ev");
    CHECK_FALSE(record.note->hallucinated_url);
    CHECK(gap_events == 1);
    CHECK(article_events == 1);
    CHECK(note_events == 1);
    CHECK(record.timings_ms.size() == 3);
}

TEST_CASE("a phase failure keeps upstream artifacts") {
    TempDir dir("pipeline_partial");
    const Tweet tweet = make_tweet("t1", "text");

    // record only the Phase-I reply on the tape
    {
        auto transport = std::make_shared<ScriptedTransport>();
        transport->reply_always({kGapArray, {}});
        RetryPolicy retry;
        retry.sleep_fn = [](std::int64_t) {};
        Gateway record_gateway(GatewayMode::RECORD, dir.path(), transport, {}, retry);
        record_gateway.complete(build_gap_prompt({tweet, {}}, "m1"));
    }

    Gateway replay(GatewayMode::REPLAY, dir.path());
    int gap_events = 0;
    PipelineSink sink;
    sink.on_gap_report = [&](const GapReport&) { ++gap_events; };

    const PipelineRecord record = run_pipeline(tweet, {}, replay, {"m1", "m2", "m3"}, {}, 0, sink);
    CHECK_FALSE(record.ok);
    REQUIRE(record.failed_phase);
    CHECK(*record.failed_phase == Phase::SEARCH);
    CHECK(record.error.find("cache miss") != std::string::npos);
    REQUIRE(record.gap_report);
    CHECK_FALSE(record.article);
    CHECK_FALSE(record.note);
    CHECK(gap_events == 1);
    CHECK(replay.network_calls() == 0);
}

TEST_CASE("cold-start pipeline uses the no-notes sentinel") {
    auto transport = std::make_shared<ScriptedTransport>();
    std::string gap_prompt_seen;
    transport->reply_when(
        [&gap_prompt_seen](const PromptRequest& r) {
            if (r.user_text.find("return ONLY the JSON array") != std::string::npos) {
                gap_prompt_seen = r.user_text;
                return true;
            }
            return false;
        },
        {kGapArray, {}});
    transport->reply_contains("Identified Gaps", {"Evidence. https://a.org", {}});
    transport->reply_contains("fact-checking article. Your task", {"Note. https://a.org", {}});
    Gateway gateway = live_gateway(transport);

    const PipelineRecord record =
        run_pipeline(make_tweet("t1", "text"), {}, gateway, {"m1", "m2", "m3"}, {}, 0);
    CHECK(record.ok);
    CHECK(gap_prompt_seen.find("\"\"\"None\"\"\"") != std::string::npos);
}
