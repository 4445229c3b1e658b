#include <doctest.h>
#include <fstream>
#include <json.hpp>

#include "gitsearch/baselines.hpp"
#include "gitsearch/prompts.hpp"
#include "support.hpp"

using namespace gitsearch;
using gitsearch::testing::make_note;
using gitsearch::testing::make_tweet;
using gitsearch::testing::ScriptedTransport;
using gitsearch::testing::TempDir;

namespace {

Gateway live_gateway(std::shared_ptr<ScriptedTransport> transport) {
    RetryPolicy retry;
    retry.sleep_fn = [](std::int64_t) {};
    return Gateway(GatewayMode::LIVE, {}, std::move(transport), {}, retry);
}

} // namespace

TEST_CASE("supernotes-lite cannot run without candidate notes") {
    auto transport = std::make_shared<ScriptedTransport>();
    Gateway gateway = live_gateway(transport);
    CHECK_THROWS_AS(supernotes_lite(make_tweet("t1", "text"), {}, gateway, "m1", {}, 0), ColdStart);
    CHECK(transport->calls == 0);
}

TEST_CASE("supernote prompt shows two-decimal ratios and omits unrated ones") {
    const auto rated_a = make_note("n1", "t1", "first note", NoteStatus::NMR, 3, 1, 1000);
    const auto rated_b = make_note("n2", "t1", "second note", NoteStatus::NMR, 0, 4, 2000);
    const auto unrated = make_note("n3", "t1", "third note", NoteStatus::NMR, 0, 0, 3000);

    const PromptRequest request =
        build_supernote_prompt(make_tweet("t1", "text"), {rated_a, rated_b, unrated}, "m1");
    const auto slots = prompts::parse_quoted_slots(request.user_text);
    REQUIRE(slots.size() == 2);
    CHECK(slots[1] ==
          "Note 1: first note\nHelpfulness score: 0.75\n\n"
          "Note 2: second note\nHelpfulness score: 0.00\n\n"
          "Note 3: third note");
    CHECK_FALSE(request.wants_search);
}

TEST_CASE("rated note views carry ratios only when rated") {
    CHECK(make_rated_view(make_note("n1", "t1", "x", NoteStatus::NMR, 3, 1)).ratio ==
          doctest::Approx(0.75));
    CHECK_FALSE(make_rated_view(make_note("n2", "t1", "x")).ratio.has_value());
}

TEST_CASE("supernote prompt introduces no URLs beyond the provided notes") {
    const auto note = make_note("n1", "t1", "claim addressed at https://inside.org", NoteStatus::NMR,
                                1, 1, 1000);
    const PromptRequest request = build_supernote_prompt(make_tweet("t1", "text"), {note}, "m1");
    const auto urls = extract_urls(request.user_text, {});
    CHECK(urls == std::vector<std::string>{"https://inside.org"});
}

TEST_CASE("supernotes-lite output is post-processed and tagged") {
    auto transport = std::make_shared<ScriptedTransport>();
    transport->reply_always({"\"Summary note. https://inside.org?utm_source=x\"", {}});
    Gateway gateway = live_gateway(transport);

    const auto note = make_note("n1", "t1", "see https://inside.org", NoteStatus::NMR, 2, 2, 1000);
    const SynthesizedNote result =
        supernotes_lite(make_tweet("t1", "text"), {note}, gateway, "m1", {}, 9);
    CHECK(result.method == Method::SUPERNOTES_LITE);
    CHECK(result.text == "Summary note. https://inside.org");
    CHECK(result.urls == std::vector<std::string>{"https://inside.org"});
    CHECK(result.created_at == 9);
}

TEST_CASE("web agent appends provider sources missing from the text") {
    auto transport = std::make_shared<ScriptedTransport>();
    transport->reply_always({"Context note without inline links.",
                             {"https://src1.org/a", "https://src2.org/b"}});
    Gateway gateway = live_gateway(transport);

    const SynthesizedNote note = web_agent(make_tweet("t1", "text"), gateway, "m1", {}, 0);
    CHECK(note.method == Method::WEB_AGENT);
    CHECK(note.text ==
          "Context note without inline links.\nhttps://src1.org/a https://src2.org/b");
    CHECK(note.urls == std::vector<std::string>{"https://src1.org/a", "https://src2.org/b"});
    CHECK_FALSE(note.no_url);
}

TEST_CASE("web agent does not duplicate inline sources") {
    auto transport = std::make_shared<ScriptedTransport>();
    transport->reply_always({"Sourced note https://src1.org/a done.", {"https://src1.org/a"}});
    Gateway gateway = live_gateway(transport);

    const SynthesizedNote note = web_agent(make_tweet("t1", "text"), gateway, "m1", {}, 0);
    CHECK(note.text == "Sourced note https://src1.org/a done.");
    CHECK(note.urls.size() == 1);
}

TEST_CASE("a replayed blank completion is a blank note") {
    TempDir dir("webagent_blank");
    const Tweet tweet = make_tweet("t1", "text");
    const PromptRequest request = build_web_agent_prompt(tweet, "m1");
    {
        std::ofstream tape(dir.path() / "gateway.tape.jsonl");
        tape << nlohmann::json{{"digest", cache_key(request).digest},
                               {"request", nlohmann::json::object()},
                               {"result",
                                {{"text", "  "},
                                 {"source_urls", nlohmann::json::array()},
                                 {"model_id", "m1"},
                                 {"latency_ms", 0}}}}
                    .dump()
             << '\n';
    }
    Gateway replay(GatewayMode::REPLAY, dir.path());
    CHECK_THROWS_AS(web_agent(tweet, replay, "m1", {}, 0), BlankNote);
}

TEST_CASE("sources rescue an otherwise blank web agent completion") {
    auto transport = std::make_shared<ScriptedTransport>();
    transport->reply_always({"  ", {"https://irrelevant.org"}});
    Gateway gateway = live_gateway(transport);
    const SynthesizedNote note = web_agent(make_tweet("t1", "text"), gateway, "m1", {}, 0);
    CHECK(note.text == "https://irrelevant.org");
}

TEST_CASE("web agent is byte-identical across replays") {
    TempDir dir("webagent_replay");
    const Tweet tweet = make_tweet("t1", "text");
    {
        auto transport = std::make_shared<ScriptedTransport>();
        transport->reply_always({"Replayed note. https://a.org", {}});
        RetryPolicy retry;
        retry.sleep_fn = [](std::int64_t) {};
        Gateway record(GatewayMode::RECORD, dir.path(), transport, {}, retry);
        web_agent(tweet, record, "m1", {}, 0);
    }
    Gateway replay_a(GatewayMode::REPLAY, dir.path());
    Gateway replay_b(GatewayMode::REPLAY, dir.path());
    const SynthesizedNote a = web_agent(tweet, replay_a, "m1", {}, 0);
    const SynthesizedNote b = web_agent(tweet, replay_b, "m1", {}, 0);
    CHECK(a.text == b.text);
    CHECK(a.urls == b.urls);
    CHECK(replay_a.network_calls() == 0);
    CHECK(replay_b.network_calls() == 0);
}
