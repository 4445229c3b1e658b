#include "gitsearch/jsonl.hpp"

#include <stdexcept>

namespace gitsearch {

namespace {

template <typename T>
void write_optional(Json& j, const char* key, const std::optional<T>& value) {
    if (value) j[key] = *value;
}

template <typename T>
void read_optional(const Json& j, const char* key, std::optional<T>& value) {
    if (j.contains(key) && !j.at(key).is_null()) {
        value = j.at(key).get<T>();
    } else {
        value.reset();
    }
}

} // namespace

void to_json(Json& j, const Tweet& t) {
    j = Json{{"tweet_id", t.tweet_id}, {"text", t.text}, {"published_at", t.published_at}};
    write_optional(j, "language_tag", t.language_tag);
    write_optional(j, "author_id", t.author_id);
}

void from_json(const Json& j, Tweet& t) {
    j.at("tweet_id").get_to(t.tweet_id);
    j.at("text").get_to(t.text);
    j.at("published_at").get_to(t.published_at);
    read_optional(j, "language_tag", t.language_tag);
    read_optional(j, "author_id", t.author_id);
}

void to_json(Json& j, const CommunityNote& n) {
    j = Json{{"note_id", n.note_id},
             {"tweet_id", n.tweet_id},
             {"text", n.text},
             {"created_at", n.created_at},
             {"status", std::string(to_string(n.status))},
             {"n_helpful", n.n_helpful},
             {"n_nothelpful", n.n_nothelpful}};
    write_optional(j, "author_id", n.author_id);
    if (n.media_flagged) j["media_flagged"] = true;
    write_optional(j, "first_status_at", n.first_status_at);
    write_optional(j, "last_status_at", n.last_status_at);
}

void from_json(const Json& j, CommunityNote& n) {
    j.at("note_id").get_to(n.note_id);
    j.at("tweet_id").get_to(n.tweet_id);
    j.at("text").get_to(n.text);
    j.at("created_at").get_to(n.created_at);
    const auto status = parse_note_status(j.at("status").get<std::string>());
    if (!status) throw InvalidRecord("unknown note status " + j.at("status").get<std::string>());
    n.status = *status;
    j.at("n_helpful").get_to(n.n_helpful);
    j.at("n_nothelpful").get_to(n.n_nothelpful);
    n.media_flagged = j.value("media_flagged", false);
    read_optional(j, "author_id", n.author_id);
    read_optional(j, "first_status_at", n.first_status_at);
    read_optional(j, "last_status_at", n.last_status_at);
}

void to_json(Json& j, const Gap& g) {
    j = Json{{"gap_type", std::string(to_string(g.gap_type))},
             {"description", g.description},
             {"priority", g.priority},
             {"suggested_query", g.suggested_query}};
}

void from_json(const Json& j, Gap& g) {
    const auto type = parse_gap_type(j.at("gap_type").get<std::string>());
    if (!type) throw InvalidRecord("unknown gap type " + j.at("gap_type").get<std::string>());
    g.gap_type = *type;
    j.at("description").get_to(g.description);
    j.at("priority").get_to(g.priority);
    j.at("suggested_query").get_to(g.suggested_query);
}

void to_json(Json& j, const GapReport& r) {
    j = Json{{"tweet_id", r.tweet_id},
             {"gaps", r.gaps},
             {"model_id", r.model_id},
             {"raw_output", r.raw_output},
             {"created_at", r.created_at}};
}

void from_json(const Json& j, GapReport& r) {
    j.at("tweet_id").get_to(r.tweet_id);
    j.at("gaps").get_to(r.gaps);
    j.at("model_id").get_to(r.model_id);
    j.at("raw_output").get_to(r.raw_output);
    j.at("created_at").get_to(r.created_at);
}

void to_json(Json& j, const EvidenceArticle& a) {
    j = Json{{"tweet_id", a.tweet_id},
             {"body", a.body},
             {"cited_urls", a.cited_urls},
             {"model_id", a.model_id},
             {"searched_at", a.searched_at}};
}

void from_json(const Json& j, EvidenceArticle& a) {
    j.at("tweet_id").get_to(a.tweet_id);
    j.at("body").get_to(a.body);
    j.at("cited_urls").get_to(a.cited_urls);
    j.at("model_id").get_to(a.model_id);
    j.at("searched_at").get_to(a.searched_at);
}

void to_json(Json& j, const SynthesizedNote& n) {
    j = Json{{"tweet_id", n.tweet_id},
             {"text", n.text},
             {"urls", n.urls},
             {"effective_length", n.effective_length},
             {"method", std::string(to_string(n.method))},
             {"over_budget", n.over_budget},
             {"created_at", n.created_at},
             {"no_url", n.no_url},
             {"hallucinated_url", n.hallucinated_url}};
    write_optional(j, "model_id", n.model_id);
}

void from_json(const Json& j, SynthesizedNote& n) {
    j.at("tweet_id").get_to(n.tweet_id);
    j.at("text").get_to(n.text);
    j.at("urls").get_to(n.urls);
    j.at("effective_length").get_to(n.effective_length);
    const auto method = parse_method(j.at("method").get<std::string>());
    if (!method) throw InvalidRecord("unknown method " + j.at("method").get<std::string>());
    n.method = *method;
    j.at("over_budget").get_to(n.over_budget);
    j.at("created_at").get_to(n.created_at);
    n.no_url = j.value("no_url", false);
    n.hallucinated_url = j.value("hallucinated_url", false);
    read_optional(j, "model_id", n.model_id);
}

std::string serialize_gaps(const std::vector<Gap>& gaps) {
    return Json(gaps).dump();
}

namespace {

// Finds the end of the balanced JSON value starting at `begin` (which must be
// '[' or '{'), honoring string literals and escapes. Returns npos if the text
// ends before the value closes.
std::size_t balanced_end(std::string_view raw, std::size_t begin) {
    const char open = raw[begin];
    const char close = (open == '[') ? ']' : '}';
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = begin; i < raw.size(); ++i) {
        const char c = raw[i];
        if (in_string) {
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == open) {
            ++depth;
        } else if (c == close) {
            --depth;
            if (depth == 0) return i + 1;
        }
    }
    return std::string_view::npos;
}

std::optional<Json> first_json_value(std::string_view raw, char opener) {
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] != opener) continue;
        const std::size_t end = balanced_end(raw, i);
        if (end == std::string_view::npos) continue;
        Json parsed = Json::parse(raw.substr(i, end - i), nullptr, false);
        if (!parsed.is_discarded()) return parsed;
    }
    return std::nullopt;
}

} // namespace

std::optional<Json> first_json_array(std::string_view raw) {
    return first_json_value(raw, '[');
}

std::optional<Json> first_json_object(std::string_view raw) {
    return first_json_value(raw, '{');
}

JsonlWriter::JsonlWriter(const std::filesystem::path& path) : path_(path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    out_.open(path, std::ios::app);
    if (!out_) throw Error("cannot open " + path.string() + " for append");
}

void JsonlWriter::append(const Json& record) {
    out_ << record.dump() << '\n';
    out_.flush();
    if (!out_) throw Error("write failed on " + path_.string());
}

std::vector<Json> read_jsonl(const std::filesystem::path& path) {
    std::vector<Json> records;
    for_each_jsonl(path, [&](const Json& j) { records.push_back(j); });
    return records;
}

void for_each_jsonl(const std::filesystem::path& path, const std::function<void(const Json&)>& fn) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        Json j = Json::parse(line);
        if (j.is_object() && j.contains("_meta")) continue;
        fn(j);
    }
}

} // namespace gitsearch
