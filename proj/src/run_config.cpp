#include "gitsearch/run_config.hpp"

#include <fstream>
#include <sstream>

#include "gitsearch/errors.hpp"
#include "gitsearch/text_util.hpp"

namespace gitsearch {

std::optional<GatewayMode> parse_gateway_mode(std::string_view token) {
    if (token == "record") return GatewayMode::RECORD;
    if (token == "replay") return GatewayMode::REPLAY;
    if (token == "offline") return GatewayMode::OFFLINE;
    if (token == "live") return GatewayMode::LIVE;
    return std::nullopt;
}

std::string_view to_string(GatewayMode mode) {
    switch (mode) {
        case GatewayMode::RECORD: return "record";
        case GatewayMode::REPLAY: return "replay";
        case GatewayMode::OFFLINE: return "offline";
        case GatewayMode::LIVE: return "live";
    }
    return "replay";
}

namespace {

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

bool parse_bool(const std::string& value, const std::string& key) {
    if (iequals(value, "true") || value == "1" || iequals(value, "yes")) return true;
    if (iequals(value, "false") || value == "0" || iequals(value, "no")) return false;
    throw ConfigInvalid(key + " must be a boolean, got \"" + value + "\"");
}

double parse_double(const std::string& value, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigInvalid(key + " must be a number, got \"" + value + "\"");
    }
}

int parse_int(const std::string& value, const std::string& key) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigInvalid(key + " must be an integer, got \"" + value + "\"");
    }
}

void apply_key(RunConfig& config, const std::string& key, const std::string& value) {
    if (key == "run_dir") config.run_dir = value;
    else if (key == "mode") {
        const auto mode = parse_gateway_mode(value);
        if (!mode) throw ConfigInvalid("mode must be record|replay|offline|live");
        config.mode = *mode;
    } else if (key == "concurrency") {
        config.concurrency = parse_int(value, key);
        if (config.concurrency < 1) throw ConfigInvalid("concurrency must be >= 1");
    }
    else if (key == "phase1_model") config.phase1_model = value;
    else if (key == "phase2_model") config.phase2_model = value;
    else if (key == "phase3_model") config.phase3_model = value;
    else if (key == "supernote_model") config.supernote_model = value;
    else if (key == "webagent_model") config.webagent_model = value;
    else if (key == "judge_model") config.judge_model = value;
    else if (key == "corpus") config.corpus_path = value;
    else if (key == "notes_tsv") config.notes_tsv = value;
    else if (key == "status_tsv") config.status_tsv = value;
    else if (key == "ratings_tsv") config.ratings_tsv = value;
    else if (key == "tweets_tsv") config.tweets_tsv = value;
    else if (key == "keywords_file") config.keywords_file = value;
    else if (key == "rankings_csv") config.rankings_csv = value;
    else if (key == "classifier.tape") config.classifier_tape = value;
    else if (key == "classifier.url") config.classifier_url = value;
    else if (key == "classifier_threshold" || key == "classifier.threshold") {
        config.classifier_threshold = parse_double(value, key);
    } else if (key == "split_fraction") {
        config.split_fraction = parse_double(value, key);
    } else if (key == "cutoff_date") {
        const auto ts = parse_timestamp(value);
        if (!ts) throw ConfigInvalid("cutoff_date must be a date or epoch millis");
        config.cutoff_date = *ts;
    }
    else if (key == "url.tracked_param_prefixes") config.url_policy.tracked_param_prefixes = split_list(value);
    else if (key == "url.tracked_param_exact") config.url_policy.tracked_param_exact = split_list(value);
    else if (key == "url.strip_fragment") config.url_policy.strip_fragment = parse_bool(value, key);
    else if (key.rfind("provider.", 0) == 0) {
        // provider.<model_id>.{style,base_url,api_key_env,search_capable}
        const std::string rest = key.substr(9);
        const std::size_t dot = rest.rfind('.');
        if (dot == std::string::npos) throw ConfigInvalid("malformed provider key " + key);
        const std::string model_id = rest.substr(0, dot);
        const std::string field = rest.substr(dot + 1);
        ProviderBinding& binding = config.providers[model_id];
        if (field == "style") binding.style = value;
        else if (field == "base_url") binding.base_url = value;
        else if (field == "api_key_env") binding.api_key_env = value;
        else if (field == "search_capable") binding.search_capable = parse_bool(value, key);
        else throw ConfigInvalid("unknown provider field " + field);
    } else if (key.rfind("schema.", 0) == 0) {
        const std::string rest = key.substr(7);
        auto& s = config.schema;
        if (rest == "notes.note_id") s.notes.note_id = value;
        else if (rest == "notes.tweet_id") s.notes.tweet_id = value;
        else if (rest == "notes.text") s.notes.text = value;
        else if (rest == "notes.created_at_millis") s.notes.created_at_millis = value;
        else if (rest == "notes.author_id") s.notes.author_id = value;
        else if (rest == "notes.media_flag") s.notes.media_flag = value;
        else if (rest == "status.note_id") s.status.note_id = value;
        else if (rest == "status.status") s.status.status = value;
        else if (rest == "status.timestamp_millis") s.status.timestamp_millis = value;
        else if (rest == "ratings.note_id") s.ratings.note_id = value;
        else if (rest == "ratings.helpfulness") s.ratings.helpfulness = value;
        else if (rest == "tweets.tweet_id") s.tweets.tweet_id = value;
        else if (rest == "tweets.text") s.tweets.text = value;
        else if (rest == "tweets.created_at") s.tweets.created_at = value;
        else if (rest == "tweets.language") s.tweets.language = value;
        else if (rest == "tweets.author_id") s.tweets.author_id = value;
        else throw ConfigInvalid("unknown schema key " + key);
    } else {
        throw ConfigInvalid("unknown key \"" + key + "\"");
    }
}

} // namespace

void RunConfig::validate() const {
    if (split_fraction <= 0.0 || split_fraction >= 1.0) {
        throw ConfigInvalid("split_fraction must be in (0,1)");
    }
    if (mode == GatewayMode::REPLAY) {
        const auto tapes = run_dir / "tapes";
        if (!std::filesystem::exists(tapes)) {
            throw ConfigInvalid("replay mode requires an existing tape directory at " +
                                tapes.string());
        }
    }
    if (mode == GatewayMode::LIVE || mode == GatewayMode::RECORD) {
        for (const std::string& model : {phase2_model, webagent_model}) {
            const auto it = providers.find(model);
            if (it != providers.end() && !it->second.search_capable) {
                throw ConfigInvalid("model " + model + " must be bound to a search-capable provider");
            }
        }
    }
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig config;
    config.config_digest = sha256_hex(text);

    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigInvalid("line " + std::to_string(line_no) + " is not \"key = value\"");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) {
            throw ConfigInvalid("empty key on line " + std::to_string(line_no));
        }
        apply_key(config, key, value);
        config.raw[key] = value;
    }
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigInvalid("cannot open config file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

} // namespace gitsearch
