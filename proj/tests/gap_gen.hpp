#pragma once

// Random valid gap arrays and targeted invalid mutations, shared between the
// unit suite and the acceptance suite.

#include <random>
#include <string>
#include <vector>

#include "gitsearch/domain.hpp"
#include "gitsearch/jsonl.hpp"

namespace gitsearch::testing {

inline std::string random_text(std::mt19937& rng) {
    static const std::vector<std::string> kPieces{
        "claim",   "source", "étude",  "№5",        "50%",   "\"quoted\"",
        "back\\slash", "line\nbreak",  "emoji 🌐", "tab\tstop", "ampersand &", "'single'",
    };
    std::uniform_int_distribution<std::size_t> count(1, 4);
    std::uniform_int_distribution<std::size_t> pick(0, kPieces.size() - 1);
    std::string out;
    const std::size_t n = count(rng);
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) out += ' ';
        out += kPieces[pick(rng)];
    }
    return out;
}

inline std::vector<Gap> random_gap_array(std::mt19937& rng) {
    std::uniform_int_distribution<std::size_t> count(1, 8);
    std::uniform_int_distribution<int> priority(1, 5);
    std::uniform_int_distribution<std::size_t> type(0, all_gap_types().size() - 1);
    std::vector<Gap> gaps;
    const std::size_t n = count(rng);
    for (std::size_t i = 0; i < n; ++i) {
        Gap gap;
        gap.gap_type = all_gap_types()[type(rng)];
        gap.description = random_text(rng);
        gap.priority = priority(rng);
        gap.suggested_query = random_text(rng);
        gaps.push_back(std::move(gap));
    }
    return gaps;
}

/// Serialized form of `gaps` with one targeted defect injected into the
/// element at `index`.
enum class GapDefect { BAD_TYPE, PRIORITY_ZERO, PRIORITY_SIX, DROP_DESCRIPTION, DROP_QUERY };

inline std::string mutate_gap_array(const std::vector<Gap>& gaps, std::size_t index,
                                    GapDefect defect) {
    Json array = Json(gaps);
    Json& target = array[index];
    switch (defect) {
        case GapDefect::BAD_TYPE: target["gap_type"] = "LIE"; break;
        case GapDefect::PRIORITY_ZERO: target["priority"] = 0; break;
        case GapDefect::PRIORITY_SIX: target["priority"] = 6; break;
        case GapDefect::DROP_DESCRIPTION: target.erase("description"); break;
        case GapDefect::DROP_QUERY: target.erase("suggested_query"); break;
    }
    return array.dump();
}

} // namespace gitsearch::testing
