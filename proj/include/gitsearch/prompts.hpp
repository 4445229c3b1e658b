#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gitsearch/domain.hpp"

namespace gitsearch::prompts {

// Raw instruction templates. Slots are [date], [tweet_text], [existing_notes],
// [gap_context], [targeted_search_article], [human_note], [ai_note]; quoted
// slots are wrapped in triple double-quotes.
std::string_view supernote_lite_template();
std::string_view web_agent_template();
std::string_view gap_identification_template();
std::string_view targeted_search_template();
std::string_view note_synthesis_template();
std::string_view judge_template();

/// Sentinel placed in the notes slot when no candidate notes exist.
inline constexpr std::string_view kNoNotesSentinel = "None";

/// Breaks any run of three-plus double quotes inside slot content so the
/// rendered prompt keeps an unambiguous slot structure.
std::string escape_slot(std::string_view content);

/// Single left-to-right pass; replacements are never rescanned, so slot
/// content cannot inject further substitutions.
std::string replace_slots(std::string_view tmpl,
                          const std::vector<std::pair<std::string_view, std::string>>& slots);

/// Contents of every """..."""-delimited block in a rendered prompt, in
/// order. Quote runs escaped by escape_slot do not terminate a block.
std::vector<std::string> parse_quoted_slots(std::string_view rendered);

/// "Note 1: ..." list in the given order; with_ratios appends a
/// "Helpfulness score: X.XX" line to each rated note and omits it for
/// unrated ones.
std::string render_notes_block(const std::vector<CommunityNote>& notes, bool with_ratios);

/// One line per gap: "TYPE | priority | description | suggested query".
std::string render_gap_block(const std::vector<Gap>& gaps);

} // namespace gitsearch::prompts
