#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gitsearch/domain.hpp"
#include "gitsearch/gateway.hpp"

namespace gitsearch {

/// A candidate note paired with its helpfulness ratio; the ratio is absent
/// when the note has no ratings.
struct RatedNoteView {
    CommunityNote note;
    std::optional<double> ratio;
};

RatedNoteView make_rated_view(const CommunityNote& note);

/// Summarizes the existing candidate notes into one note, with per-note
/// helpfulness ratios supplied in context. Fails with ColdStart when the
/// tweet has no candidate notes; that failure mode is part of the contract.
SynthesizedNote supernotes_lite(const Tweet& tweet,
                                const std::vector<CommunityNote>& candidate_notes,
                                Gateway& backend, const std::string& model_id,
                                const UrlNormalizationPolicy& policy, TimestampMillis now);

PromptRequest build_supernote_prompt(const Tweet& tweet,
                                     const std::vector<CommunityNote>& candidate_notes,
                                     const std::string& model_id);

/// Single-shot search-enabled note generation straight from the tweet.
/// Provider-reported sources missing from the note text are appended at the
/// end, then the note is post-processed.
SynthesizedNote web_agent(const Tweet& tweet, Gateway& backend, const std::string& model_id,
                          const UrlNormalizationPolicy& policy, TimestampMillis now);

PromptRequest build_web_agent_prompt(const Tweet& tweet, const std::string& model_id);

} // namespace gitsearch
