#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gitsearch/curation.hpp"
#include "gitsearch/gateway.hpp"

namespace gitsearch {

/// Everything one run needs, loaded from a key-value config file (see
/// README for the schema). Credentials come from environment variables only.
struct RunConfig {
    std::filesystem::path run_dir = "run";
    GatewayMode mode = GatewayMode::REPLAY;
    int concurrency = 4;

    std::string phase1_model = "default-model";
    std::string phase2_model = "default-search-model";
    std::string phase3_model = "default-model";
    std::string supernote_model = "default-model";
    std::string webagent_model = "default-search-model";
    std::string judge_model = "default-judge";

    UrlNormalizationPolicy url_policy;
    std::unordered_map<std::string, ProviderBinding> providers;

    std::filesystem::path corpus_path;
    std::filesystem::path notes_tsv;
    std::filesystem::path status_tsv;
    std::filesystem::path ratings_tsv;
    std::filesystem::path tweets_tsv;
    std::filesystem::path keywords_file;
    std::filesystem::path rankings_csv;
    std::filesystem::path classifier_tape;
    std::string classifier_url;

    SchemaMap schema;
    double split_fraction = 0.10;
    double classifier_threshold = 0.5;
    TimestampMillis cutoff_date = 1609459200000; // 2021-01-01T00:00:00Z

    std::string config_digest; // SHA-256 of the raw config text
    std::map<std::string, std::string> raw; // every parsed key, for audit

    void validate() const;
};

/// Parses "key = value" lines; '#' starts a comment; later keys override
/// earlier ones. Throws ConfigInvalid on unknown syntax or bad values.
RunConfig load_config(const std::filesystem::path& path);

/// Builds a config from in-memory text (tests, defaults).
RunConfig parse_config_text(const std::string& text);

std::optional<GatewayMode> parse_gateway_mode(std::string_view token);
std::string_view to_string(GatewayMode mode);

} // namespace gitsearch
