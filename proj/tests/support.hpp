#pragma once

// Shared fixtures and fakes for the test suites.

#include <atomic>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "gitsearch/domain.hpp"
#include "gitsearch/gateway.hpp"

namespace gitsearch::testing {

inline Tweet make_tweet(std::string id, std::string text,
                        TimestampMillis published = 1756684800000 /* 2025-09-01 */) {
    Tweet tweet;
    tweet.tweet_id = std::move(id);
    tweet.text = std::move(text);
    tweet.published_at = published;
    return tweet;
}

inline CommunityNote make_note(std::string note_id, std::string tweet_id, std::string text,
                               NoteStatus status = NoteStatus::NMR, std::int64_t helpful = 0,
                               std::int64_t nothelpful = 0,
                               TimestampMillis created = 1756684800000) {
    CommunityNote note;
    note.note_id = std::move(note_id);
    note.tweet_id = std::move(tweet_id);
    note.text = std::move(text);
    note.created_at = created;
    note.status = status;
    note.n_helpful = helpful;
    note.n_nothelpful = nothelpful;
    return note;
}

/// Transport scripted with (matcher, reply) rules; first match wins. Calls
/// with no matching rule throw, which keeps tests honest about what they
/// expect to reach the provider.
class ScriptedTransport : public Transport {
public:
    using Matcher = std::function<bool(const PromptRequest&)>;

    void reply_when(Matcher matcher, ProviderReply reply) {
        rules_.push_back({std::move(matcher), std::move(reply), nullptr});
    }
    void throw_when(Matcher matcher, std::function<void()> thrower) {
        rules_.push_back({std::move(matcher), {}, std::move(thrower)});
    }
    void reply_contains(std::string needle, ProviderReply reply) {
        reply_when(
            [needle = std::move(needle)](const PromptRequest& r) {
                return r.user_text.find(needle) != std::string::npos;
            },
            std::move(reply));
    }
    void reply_always(ProviderReply reply) {
        reply_when([](const PromptRequest&) { return true; }, std::move(reply));
    }

    ProviderReply send(const PromptRequest& request) override {
        ++calls;
        for (const Rule& rule : rules_) {
            if (rule.matcher(request)) {
                if (rule.thrower) rule.thrower();
                return rule.reply;
            }
        }
        throw TransportError("scripted transport has no rule for this request");
    }

    std::atomic<int> calls{0};

private:
    struct Rule {
        Matcher matcher;
        ProviderReply reply;
        std::function<void()> thrower;
    };
    std::vector<Rule> rules_;
};

/// Unique scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("gitsearch_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// Deterministic RNG for property tests.
inline std::mt19937& prng() {
    static std::mt19937 rng(0xC0FFEE);
    return rng;
}

} // namespace gitsearch::testing
