#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gitsearch/domain.hpp"

namespace gitsearch {

using Json = nlohmann::json;

// ADL serializers; JSONL field names match the record field names.
void to_json(Json& j, const Tweet& t);
void from_json(const Json& j, Tweet& t);
void to_json(Json& j, const CommunityNote& n);
void from_json(const Json& j, CommunityNote& n);
void to_json(Json& j, const Gap& g);
void from_json(const Json& j, Gap& g);
void to_json(Json& j, const GapReport& r);
void from_json(const Json& j, GapReport& r);
void to_json(Json& j, const EvidenceArticle& a);
void from_json(const Json& j, EvidenceArticle& a);
void to_json(Json& j, const SynthesizedNote& n);
void from_json(const Json& j, SynthesizedNote& n);

/// Serializes a gap list to the canonical JSON array form understood by
/// parse_gap_response.
std::string serialize_gaps(const std::vector<Gap>& gaps);

/// Locates the first well-formed JSON array in free-form model output.
/// Returns std::nullopt when none exists.
std::optional<Json> first_json_array(std::string_view raw);

/// Locates the first well-formed JSON object in free-form model output.
std::optional<Json> first_json_object(std::string_view raw);

// ---- JSONL files ------------------------------------------------------------

/// Appends one record per line. The stream is opened in append mode so a run
/// can resume without rewriting prior work.
class JsonlWriter {
public:
    explicit JsonlWriter(const std::filesystem::path& path);

    void append(const Json& record);
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

/// Reads every record; lines whose top-level object contains "_meta" are
/// file headers and are skipped. Blank lines are ignored.
std::vector<Json> read_jsonl(const std::filesystem::path& path);

/// Calls `fn` for each non-header record.
void for_each_jsonl(const std::filesystem::path& path, const std::function<void(const Json&)>& fn);

} // namespace gitsearch
