#pragma once

#include <string>
#include <vector>

#include "gitsearch/domain.hpp"
#include "gitsearch/gateway.hpp"

namespace gitsearch {

/// Phase II input: the tweet, its candidate notes, and the prioritized gaps.
struct SearchPromptContext {
    Tweet tweet;
    std::vector<CommunityNote> candidate_notes;
    GapReport gap_report;

    void validate() const;
};

/// Renders the targeted-search instruction. The gap block lists every gap in
/// priority-descending order; wants_search is set.
PromptRequest build_search_prompt(const SearchPromptContext& ctx, const std::string& model_id);

/// Runs the targeted search and merges inline and provider-reported citations
/// into the article's normalized URL list.
EvidenceArticle retrieve_evidence(const SearchPromptContext& ctx, Gateway& backend,
                                  const std::string& model_id,
                                  const UrlNormalizationPolicy& policy, TimestampMillis now);

} // namespace gitsearch
