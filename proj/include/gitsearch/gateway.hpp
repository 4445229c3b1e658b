#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "gitsearch/domain.hpp"
#include "gitsearch/errors.hpp"

namespace gitsearch {

enum class TemperaturePolicy { PROVIDER_DEFAULT, DETERMINISTIC };

struct PromptRequest {
    std::string model_id;
    std::optional<std::string> system_text;
    std::string user_text;
    bool wants_search = false;
    std::optional<std::int64_t> max_output_chars;
    TemperaturePolicy temperature_policy = TemperaturePolicy::DETERMINISTIC;

    void validate() const;
};

struct CompletionResult {
    std::string text;
    std::vector<std::string> source_urls; // normalized, deduplicated
    std::string model_id;
    std::int64_t latency_ms = 0;
    bool from_cache = false;
};

struct CacheKey {
    std::string digest; // 64 hex chars (SHA-256)
    bool operator==(const CacheKey&) const = default;
};

/// Lowercase hex SHA-256 digest of arbitrary bytes.
std::string sha256_hex(std::string_view payload);

/// SHA-256 over the JSON encoding of (model_id, system_text, user_text,
/// wants_search). Fields outside this tuple never affect the key.
CacheKey cache_key(const PromptRequest& request);

// ---- transports ---------------------------------------------------------------

/// Raw provider reply before citation unification.
struct ProviderReply {
    std::string text;
    std::vector<std::string> source_urls; // structured citations as reported
};

/// One provider call. Implementations throw TransportError / RateLimited /
/// MalformedResponse.
class Transport {
public:
    virtual ~Transport() = default;
    virtual ProviderReply send(const PromptRequest& request) = 0;
};

/// Provider endpoint descriptor, declared by name in run configuration.
struct ProviderBinding {
    std::string style = "openai_chat";
    std::string base_url;
    std::string api_key_env;
    bool search_capable = false;
};

/// HTTPS transport speaking the OpenAI-compatible chat-completions protocol.
/// Structured citations are read from `citations` (top level) and
/// `message.annotations[].url_citation.url`.
class HttpTransport : public Transport {
public:
    explicit HttpTransport(std::unordered_map<std::string, ProviderBinding> bindings);
    ProviderReply send(const PromptRequest& request) override;

private:
    std::unordered_map<std::string, ProviderBinding> bindings_;
};

// ---- gateway ---------------------------------------------------------------------

enum class GatewayMode { RECORD, REPLAY, OFFLINE, LIVE };

struct RetryPolicy {
    int max_attempts = 5;
    std::int64_t base_backoff_ms = 500;
    std::int64_t max_backoff_ms = 8000;
    // injectable for tests; defaults to a real sleep
    std::function<void(std::int64_t)> sleep_fn;
};

/// Uniform access to completion backends with retries and a content-addressed
/// record/replay cache. Safe for concurrent calls; tape appends serialize
/// through one writer.
class Gateway {
public:
    Gateway(GatewayMode mode, std::filesystem::path tape_dir,
            std::shared_ptr<Transport> transport = nullptr,
            UrlNormalizationPolicy url_policy = {}, RetryPolicy retry = {},
            int max_in_flight = 4);

    CompletionResult complete(const PromptRequest& request);

    GatewayMode mode() const { return mode_; }
    std::int64_t network_calls() const { return network_calls_.load(); }
    std::int64_t cache_hits() const { return cache_hits_.load(); }

    /// Loads every *.tape.jsonl under `dir` into the in-memory index.
    void load_tapes(const std::filesystem::path& dir);

private:
    CompletionResult call_with_retries(const PromptRequest& request);
    void unify_citations(const PromptRequest& request, CompletionResult& result,
                         const std::vector<std::string>& structured) const;

    GatewayMode mode_;
    std::filesystem::path tape_dir_;
    std::shared_ptr<Transport> transport_;
    UrlNormalizationPolicy url_policy_;
    RetryPolicy retry_;

    mutable std::shared_mutex index_mutex_;
    std::unordered_map<std::string, CompletionResult> index_;

    std::mutex writer_mutex_;
    std::ofstream tape_out_;

    std::mutex in_flight_mutex_;
    std::condition_variable_any in_flight_cv_;
    int in_flight_ = 0;
    int max_in_flight_ = 4;

    std::atomic<std::int64_t> network_calls_{0};
    std::atomic<std::int64_t> cache_hits_{0};
};

/// Appends `urls` (space separated, after a newline) to `text`, skipping any
/// URL already present; returns `text` unchanged when nothing is missing.
std::string append_missing_sources(const std::string& text, const std::vector<std::string>& urls,
                                   const UrlNormalizationPolicy& policy);

} // namespace gitsearch
