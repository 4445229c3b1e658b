#pragma once

#include <string>
#include <vector>

#include "gitsearch/domain.hpp"
#include "gitsearch/gateway.hpp"

namespace gitsearch {

/// Input tuple for gap identification: the tweet and its candidate notes
/// (needs-more-ratings state), possibly empty.
struct GapPromptContext {
    Tweet tweet;
    std::vector<CommunityNote> candidate_notes;

    void validate() const;
};

/// Renders the gap-identification instruction for one tweet. Candidate notes
/// are numbered in created_at order; an empty note set renders the literal
/// no-notes sentinel.
PromptRequest build_gap_prompt(const GapPromptContext& ctx, const std::string& model_id);

/// Pulls the first well-formed JSON array out of free-form model output and
/// validates every element against the closed six-type taxonomy.
/// Throws NoArrayFound / InvalidGapType / PriorityOutOfRange / MissingField.
std::vector<Gap> parse_gap_response(const std::string& raw);

/// Full Phase I step: prompt, complete, parse (with one format-reminder
/// re-ask), then sort by priority descending with stable ties. A tweet
/// without notes must yield at least one gap.
GapReport detect_gaps(const GapPromptContext& ctx, Gateway& backend, const std::string& model_id,
                      TimestampMillis now);

} // namespace gitsearch
