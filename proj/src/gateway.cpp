#include "gitsearch/gateway.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <thread>

#include <json.hpp>
#include <openssl/evp.h>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "gitsearch/jsonl.hpp"

namespace gitsearch {

using Json = nlohmann::json;

void PromptRequest::validate() const {
    if (model_id.empty()) throw InvalidRecord("prompt request has empty model_id");
    if (user_text.empty()) throw InvalidRecord("prompt request has empty user_text");
}

std::string sha256_hex(std::string_view payload) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int digest_len = 0;
    EVP_Digest(payload.data(), payload.size(), digest, &digest_len, EVP_sha256(), nullptr);

    static constexpr char kHex[] = "0123456789abcdef";
    std::string hex;
    hex.reserve(digest_len * 2);
    for (unsigned int i = 0; i < digest_len; ++i) {
        hex.push_back(kHex[digest[i] >> 4]);
        hex.push_back(kHex[digest[i] & 0x0F]);
    }
    return hex;
}

CacheKey cache_key(const PromptRequest& request) {
    Json keyed = Json::array();
    keyed.push_back(request.model_id);
    if (request.system_text) {
        keyed.push_back(*request.system_text);
    } else {
        keyed.push_back(nullptr);
    }
    keyed.push_back(request.user_text);
    keyed.push_back(request.wants_search);
    return CacheKey{sha256_hex(keyed.dump())};
}

// ---- HttpTransport -----------------------------------------------------------

HttpTransport::HttpTransport(std::unordered_map<std::string, ProviderBinding> bindings)
    : bindings_(std::move(bindings)) {}

ProviderReply HttpTransport::send(const PromptRequest& request) {
    const auto it = bindings_.find(request.model_id);
    if (it == bindings_.end()) {
        throw TransportError("no provider binding for model " + request.model_id);
    }
    const ProviderBinding& binding = it->second;

    std::string api_key;
    if (!binding.api_key_env.empty()) {
        if (const char* v = std::getenv(binding.api_key_env.c_str())) api_key = v;
        if (api_key.empty()) {
            throw TransportError("environment variable " + binding.api_key_env + " is not set");
        }
    }

    Json body;
    body["model"] = request.model_id;
    Json messages = Json::array();
    if (request.system_text) {
        messages.push_back({{"role", "system"}, {"content", *request.system_text}});
    }
    messages.push_back({{"role", "user"}, {"content", request.user_text}});
    body["messages"] = std::move(messages);
    if (request.temperature_policy == TemperaturePolicy::DETERMINISTIC) {
        body["temperature"] = 0.0;
    }
    if (request.wants_search) {
        body["web_search_options"] = Json::object();
    }

    httplib::Client client(binding.base_url);
    client.set_connection_timeout(30);
    client.set_read_timeout(600);
    httplib::Headers headers;
    if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);

    const auto res = client.Post("/chat/completions", headers, body.dump(), "application/json");
    if (!res) throw TransportError("connection failed to " + binding.base_url);
    if (res->status == 429 || res->status >= 500) {
        throw RateLimited("HTTP " + std::to_string(res->status) + " from " + binding.base_url);
    }
    if (res->status != 200) {
        throw TransportError("HTTP " + std::to_string(res->status) + ": " + res->body);
    }

    Json parsed = Json::parse(res->body, nullptr, false);
    if (parsed.is_discarded()) throw MalformedResponse("undecodable provider payload");

    ProviderReply reply;
    try {
        const Json& message = parsed.at("choices").at(0).at("message");
        reply.text = message.value("content", std::string{});
        if (message.contains("annotations")) {
            for (const Json& a : message["annotations"]) {
                if (a.value("type", "") == "url_citation" && a.contains("url_citation")) {
                    reply.source_urls.push_back(a["url_citation"].value("url", std::string{}));
                }
            }
        }
        if (parsed.contains("citations")) {
            for (const Json& c : parsed["citations"]) {
                if (c.is_string()) reply.source_urls.push_back(c.get<std::string>());
            }
        }
    } catch (const Json::exception& e) {
        throw MalformedResponse(e.what());
    }
    if (reply.text.empty()) throw MalformedResponse("provider returned empty text");
    return reply;
}

// ---- Gateway --------------------------------------------------------------------

namespace {

Json result_to_json(const CompletionResult& r) {
    return Json{{"text", r.text},
                {"source_urls", r.source_urls},
                {"model_id", r.model_id},
                {"latency_ms", r.latency_ms}};
}

CompletionResult result_from_json(const Json& j) {
    CompletionResult r;
    j.at("text").get_to(r.text);
    j.at("source_urls").get_to(r.source_urls);
    j.at("model_id").get_to(r.model_id);
    r.latency_ms = j.value("latency_ms", 0);
    return r;
}

Json request_to_json(const PromptRequest& r) {
    Json j{{"model_id", r.model_id},
           {"user_text", r.user_text},
           {"wants_search", r.wants_search},
           {"temperature_policy",
            r.temperature_policy == TemperaturePolicy::DETERMINISTIC ? "DETERMINISTIC"
                                                                     : "PROVIDER_DEFAULT"}};
    if (r.system_text) j["system_text"] = *r.system_text;
    if (r.max_output_chars) j["max_output_chars"] = *r.max_output_chars;
    return j;
}

} // namespace

Gateway::Gateway(GatewayMode mode, std::filesystem::path tape_dir,
                 std::shared_ptr<Transport> transport, UrlNormalizationPolicy url_policy,
                 RetryPolicy retry, int max_in_flight)
    : mode_(mode),
      tape_dir_(std::move(tape_dir)),
      transport_(std::move(transport)),
      url_policy_(std::move(url_policy)),
      retry_(std::move(retry)),
      max_in_flight_(max_in_flight) {
    if (!retry_.sleep_fn) {
        retry_.sleep_fn = [](std::int64_t ms) {
            std::this_thread::sleep_for(std::chrono::milliseconds(ms));
        };
    }
    if (!tape_dir_.empty() && (mode_ == GatewayMode::RECORD || mode_ == GatewayMode::REPLAY)) {
        std::filesystem::create_directories(tape_dir_);
        load_tapes(tape_dir_);
    }
    if (mode_ == GatewayMode::RECORD) {
        tape_out_.open(tape_dir_ / "gateway.tape.jsonl", std::ios::app);
        if (!tape_out_) throw Error("cannot open tape file for append in " + tape_dir_.string());
    }
}

void Gateway::load_tapes(const std::filesystem::path& dir) {
    if (!std::filesystem::exists(dir)) return;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().filename().string().ends_with(".tape.jsonl")) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::unique_lock lock(index_mutex_);
    for (const auto& file : files) {
        std::ifstream in(file);
        std::string line;
        while (std::getline(in, line)) {
            if (trim(line).empty()) continue;
            Json j = Json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.contains("digest") || !j.contains("result")) continue;
            index_[j["digest"].get<std::string>()] = result_from_json(j["result"]);
        }
    }
}

CompletionResult Gateway::complete(const PromptRequest& request) {
    request.validate();
    const CacheKey key = cache_key(request);

    {
        std::shared_lock lock(index_mutex_);
        const auto it = index_.find(key.digest);
        if (it != index_.end()) {
            CompletionResult hit = it->second;
            hit.from_cache = true;
            cache_hits_.fetch_add(1);
            return hit;
        }
    }

    if (mode_ == GatewayMode::REPLAY) throw CacheMiss(key.digest);
    if (mode_ == GatewayMode::OFFLINE) throw OfflineMode();
    if (!transport_) throw TransportError("no transport configured");

    CompletionResult result = call_with_retries(request);

    {
        std::unique_lock lock(index_mutex_);
        const auto [it, inserted] = index_.emplace(key.digest, result);
        if (!inserted) {
            // another worker raced us; serve the recorded result
            CompletionResult hit = it->second;
            hit.from_cache = true;
            return hit;
        }
    }
    if (mode_ == GatewayMode::RECORD) {
        std::lock_guard lock(writer_mutex_);
        Json record{{"digest", key.digest},
                    {"request", request_to_json(request)},
                    {"result", result_to_json(result)}};
        tape_out_ << record.dump() << '\n';
        tape_out_.flush();
    }
    result.from_cache = false;
    return result;
}

CompletionResult Gateway::call_with_retries(const PromptRequest& request) {
    {
        std::unique_lock lock(in_flight_mutex_);
        in_flight_cv_.wait(lock, [&] { return in_flight_ < max_in_flight_; });
        ++in_flight_;
    }
    struct Release {
        Gateway* g;
        ~Release() {
            {
                std::lock_guard lock(g->in_flight_mutex_);
                --g->in_flight_;
            }
            g->in_flight_cv_.notify_one();
        }
    } release{this};

    std::mt19937_64 jitter_rng{std::random_device{}()};
    std::string last_error;
    for (int attempt = 1; attempt <= retry_.max_attempts; ++attempt) {
        try {
            const auto start = std::chrono::steady_clock::now();
            network_calls_.fetch_add(1);
            ProviderReply reply = transport_->send(request);
            const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                                     std::chrono::steady_clock::now() - start)
                                     .count();
            if (trim(reply.text).empty() && reply.source_urls.empty()) {
                throw MalformedResponse("empty payload");
            }
            CompletionResult result;
            result.text = reply.text;
            result.model_id = request.model_id;
            result.latency_ms = elapsed;
            unify_citations(request, result, reply.source_urls);
            return result;
        } catch (const RateLimited& e) {
            last_error = e.what();
        } catch (const TransportError& e) {
            last_error = e.what();
        }
        if (attempt < retry_.max_attempts) {
            const std::int64_t backoff =
                std::min(retry_.max_backoff_ms, retry_.base_backoff_ms << (attempt - 1));
            std::uniform_int_distribution<std::int64_t> dist(0, backoff / 2);
            retry_.sleep_fn(backoff + dist(jitter_rng));
        }
    }
    throw TransportError("retry budget exhausted: " + last_error);
}

void Gateway::unify_citations(const PromptRequest& request, CompletionResult& result,
                              const std::vector<std::string>& structured) const {
    if (!request.wants_search) {
        for (const std::string& url : structured) {
            const std::string n = normalize_url(url, url_policy_);
            if (!n.empty() &&
                std::find(result.source_urls.begin(), result.source_urls.end(), n) ==
                    result.source_urls.end()) {
                result.source_urls.push_back(n);
            }
        }
        return;
    }
    std::vector<std::string> merged = extract_urls(result.text, url_policy_);
    for (const std::string& url : structured) {
        const std::string n = normalize_url(url, url_policy_);
        if (!n.empty() && std::find(merged.begin(), merged.end(), n) == merged.end()) {
            merged.push_back(n);
        }
    }
    result.source_urls = std::move(merged);
}

std::string append_missing_sources(const std::string& text, const std::vector<std::string>& urls,
                                   const UrlNormalizationPolicy& policy) {
    const std::vector<std::string> present = extract_urls(text, policy);
    std::vector<std::string> missing;
    for (const std::string& url : urls) {
        const std::string n = normalize_url(url, policy);
        if (n.empty()) continue;
        if (std::find(present.begin(), present.end(), n) != present.end()) continue;
        if (std::find(missing.begin(), missing.end(), n) != missing.end()) continue;
        missing.push_back(n);
    }
    if (missing.empty()) return text;
    std::string out = text;
    out += '\n';
    for (std::size_t i = 0; i < missing.size(); ++i) {
        if (i > 0) out += ' ';
        out += missing[i];
    }
    return out;
}

} // namespace gitsearch
