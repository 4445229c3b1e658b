#include <doctest.h>

#include "gitsearch/domain.hpp"
#include "support.hpp"

using namespace gitsearch;
using gitsearch::testing::make_note;

TEST_CASE("helpfulness ratio") {
    CHECK(helpfulness_ratio(make_note("n1", "t1", "x", NoteStatus::NMR, 2, 2)) == doctest::Approx(0.5));
    CHECK(helpfulness_ratio(make_note("n2", "t1", "x", NoteStatus::NMR, 0, 3)) == doctest::Approx(0.0));
    CHECK(helpfulness_ratio(make_note("n3", "t1", "x", NoteStatus::NMR, 7, 3)) == doctest::Approx(0.7));
    CHECK_THROWS_AS(helpfulness_ratio(make_note("n4", "t1", "x")), ZeroRatings);
}

TEST_CASE("helpfulness ratio is monotone in helpful count") {
    std::uniform_int_distribution<std::int64_t> dist(0, 50);
    for (int trial = 0; trial < 200; ++trial) {
        const std::int64_t nothelpful = dist(gitsearch::testing::prng());
        double previous = -1.0;
        for (std::int64_t helpful = (nothelpful == 0 ? 1 : 0); helpful <= 20; ++helpful) {
            const double r = helpfulness_ratio(make_note("n", "t", "x", NoteStatus::NMR, helpful, nothelpful));
            CHECK(r >= previous);
            previous = r;
        }
    }
}

TEST_CASE("extract_urls normalizes and deduplicates") {
    const UrlNormalizationPolicy policy;

    SUBCASE("tracking parameter, case, trailing punctuation") {
        const auto urls = extract_urls("see https://Example.com/A?utm_source=openai.", policy);
        REQUIRE(urls.size() == 1);
        CHECK(urls[0] == "https://example.com/A");
    }
    SUBCASE("no URLs") {
        CHECK(extract_urls("no links here", policy).empty());
    }
    SUBCASE("fragment strip plus dedup") {
        const auto urls = extract_urls("https://a.org/x https://a.org/x#frag", policy);
        REQUIRE(urls.size() == 1);
        CHECK(urls[0] == "https://a.org/x");
    }
    SUBCASE("kept query parameters survive") {
        const auto urls = extract_urls("https://site.org/p?id=3&utm_campaign=x&ref=y#sec", policy);
        REQUIRE(urls.size() == 1);
        CHECK(urls[0] == "https://site.org/p?id=3");
    }
    SUBCASE("exact tracked keys do not match by prefix") {
        const auto urls = extract_urls("https://a.org/?referrer=x", policy);
        REQUIRE(urls.size() == 1);
        CHECK(urls[0] == "https://a.org/?referrer=x");
    }
    SUBCASE("first-occurrence order preserved") {
        const auto urls = extract_urls("https://b.org then https://a.org then https://b.org", policy);
        REQUIRE(urls.size() == 2);
        CHECK(urls[0] == "https://b.org");
        CHECK(urls[1] == "https://a.org");
    }
}

TEST_CASE("extract_urls is idempotent on its own output") {
    const UrlNormalizationPolicy policy;
    const std::vector<std::string> texts{
        "see https://Example.com/A?utm_source=openai.",
        "https://a.org/x#frag and (https://B.org/y?ref=1&q=2)!",
        "mixed https://UPPER.com/Keep?x=1&utm_a=2, tail https://z.io/.",
    };
    for (const std::string& text : texts) {
        for (const std::string& url : extract_urls(text, policy)) {
            const auto again = extract_urls(url, policy);
            REQUIRE(again.size() == 1);
            CHECK(again[0] == url);
        }
    }
}

TEST_CASE("effective length treats each URL as one character") {
    CHECK(effective_length("Claim false. https://example.com/a") == 14);
    CHECK(effective_length("") == 0);
    CHECK(effective_length("https://a.org https://b.org") == 3);
    // unicode scalar counting, not bytes
    CHECK(effective_length("café ☕") == 6);
    CHECK(char_count("café ☕") == 6);
}

TEST_CASE("effective length identity and bound") {
    const std::vector<std::string> texts{
        "",
        "plain text only",
        "Claim false. https://example.com/a",
        "https://a.org https://b.org",
        "tail https://x.io/p?a=1. done",
        "café ☕ https://a.org/x",
    };
    for (const std::string& text : texts) {
        const auto spans = find_url_spans(text);
        std::int64_t shrunk = 0;
        for (const UrlSpan& span : spans) {
            shrunk += char_count(span.view(text)) - 1;
        }
        CHECK(effective_length(text) == char_count(text) - shrunk);
        CHECK(effective_length(text) <= char_count(text));
        if (spans.empty()) {
            CHECK(effective_length(text) == char_count(text));
        } else {
            CHECK(effective_length(text) < char_count(text));
        }
    }
}

TEST_CASE("synthesized note construction derives fields from text") {
    const UrlNormalizationPolicy policy;
    const auto note = make_synthesized_note("t1", "Claim false. https://example.com/a",
                                            Method::GITSEARCH, "model-x", 42, policy);
    CHECK(note.urls == std::vector<std::string>{"https://example.com/a"});
    CHECK(note.effective_length == 14);
    CHECK_FALSE(note.over_budget);
    CHECK_FALSE(note.no_url);

    std::string long_text;
    for (int i = 0; i < 30; ++i) long_text += "0123456789";
    const auto over = make_synthesized_note("t1", long_text, Method::WEB_AGENT, std::nullopt, 42, policy);
    CHECK(over.effective_length == 300);
    CHECK(over.over_budget);
    CHECK(over.no_url);
}

TEST_CASE("tweet and note validation") {
    Tweet blank = gitsearch::testing::make_tweet("t1", "   ");
    CHECK_THROWS_AS(blank.validate(), InvalidRecord);
    Tweet no_id = gitsearch::testing::make_tweet("", "text");
    CHECK_THROWS_AS(no_id.validate(), InvalidRecord);

    CommunityNote negative = make_note("n1", "t1", "x");
    negative.n_helpful = -1;
    CHECK_THROWS_AS(negative.validate(), InvalidRecord);
}
