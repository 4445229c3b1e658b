#include "gitsearch/prompts.hpp"

#include <cstdio>

namespace gitsearch::prompts {

namespace {

constexpr std::string_view kHelpfulAttributes =
    "Helpful attributes in notes include:\n"
    "- Cites high-quality sources\n"
    "- Easy to understand\n"
    "- Directly addresses the post's claim\n"
    "- Provides important context\n"
    "- Neutral or unbiased language\n"
    "\n"
    "Unhelpful attributes in notes include:\n"
    "- Sources not included or unreliable\n"
    "- Sources do not support note\n"
    "- Incorrect information\n"
    "- Opinion or speculation\n"
    "- Typos or unclear language\n"
    "- Misses key points or irrelevant\n"
    "- Argumentative or biased language\n"
    "- Note not needed on this post\n"
    "- Harassment or abuse\n";

const std::string kSupernoteLite = std::string(
    "You are an expert fact-checker. X (Twitter) has a crowd-sourced fact-checking program, "
    "called Community Notes. Here, users can write 'notes' on potentially misleading tweets. "
    "Each note needs to be rated helpful by a sufficient number of diversely-opinionated people "
    "(note-raters) for it to be shown publicly alongside the piece of content.\n\n") +
    std::string(kHelpfulAttributes) +
    "\n"
    "### Task\n"
    "You will be given a potentially misleading tweet, its existing community notes, and the "
    "helpfulness scores (0-1) of those notes. Your task is to create a single helpful Super "
    "Community Note that balances the perspectives reflected in the helpfulness scores while "
    "summarizing the key points from the notes. The Supernote should provide clear, factual "
    "context that addresses the potentially misleading information in the tweet and be strong "
    "enough to replace all existing notes.\n"
    "- The note must be within 280 characters. Treat each URL as 1 character, regardless of its "
    "actual length.\n"
    "- The note must include one or more URLs to credible sources. Use only URLs explicitly "
    "provided in context. Do not invent or substitute other URLs.\n"
    "- The note must be neutral, factual, and concise. When possible, cite sources across the "
    "political spectrum to strengthen neutrality, but prioritize reliability and relevance.\n"
    "- Output only the Super Community Note text, with URLs included. Do not add explanations, "
    "formatting, or extra commentary.\n"
    "- Do not include any information beyond what is explicitly provided in the context.\n"
    "\n"
    "---\n"
    "Tweet (published on [date]):\n"
    "\"\"\"[tweet_text]\"\"\"\n"
    "\n"
    "Existing Community Note(s):\n"
    "\"\"\"[existing_notes]\"\"\"\n"
    "\n"
    "Super Community Note:";

const std::string kWebAgent = std::string(
    "You are an expert fact-checker with the ability to use web search tool, enabling you to "
    "verify information and write accurate notes to debunk misinformation. X (Twitter) has a "
    "crowd-sourced fact-checking program, called Community Notes. Here, users can write 'notes' "
    "on potentially misleading tweets. Each note needs to be rated helpful by a sufficient "
    "number of diversely-opinionated people (note-raters) for it to be shown publicly alongside "
    "the piece of content.\n\n") +
    std::string(kHelpfulAttributes) +
    "\n"
    "### Task\n"
    "Write a helpful Community Note that clarifies or contextualizes the potentially misleading "
    "information in the tweet by providing additional context.\n"
    "- The note must be within 280 characters. Treat each URL as 1 character, regardless of its "
    "actual length.\n"
    "- The note must include one or more URLs to credible sources.\n"
    "- The note must be neutral, factual, and concise. When possible, cite sources across the "
    "political spectrum to strengthen neutrality, but prioritize reliability and relevance.\n"
    "- Output only the Community Note text, with URLs included. Do not add explanations, "
    "formatting, or extra commentary.\n"
    "\n"
    "---\n"
    "Tweet (published on [date]):\n"
    "\"\"\"[tweet_text]\"\"\"\n"
    "\n"
    "Community Note:";

constexpr std::string_view kGapIdentification =
    "You are an expert fact-checker and detective analyzing potentially misleading tweets and "
    "community notes to find gaps and conflicts.\n"
    "\n"
    "### Task\n"
    "Analyze the given potentially misleading tweet and associated community notes (if any) to "
    "identify gaps in information, contradictions, or areas needing further investigation. Your "
    "goal is to produce a structured list of gaps that require targeted searches to verify facts "
    "and provide additional context. Categorize each gap into ONE of these types:\n"
    "\n"
    "UNSUBSTANTIATED_CLAIM: Factual claims made without sources or evidence\n"
    "Example: \"Studies show X\" but no studies are cited\n"
    "If no notes exist: The tweet makes a factual claim that requires verification.\n"
    "\n"
    "CONTRADICTION: Conflicting information\n"
    "Example: Note 1 says \"increases\" but Note 2 says \"decreases\"\n"
    "If no notes exist: The tweet contains internal contradictions or logical fallacies.\n"
    "\n"
    "VAGUE_REFERENCE: Non-specific references that should be made concrete\n"
    "Example: \"some studies\", \"recent reports\"\n"
    "\n"
    "MISSING_CONTEXT: Statistics, numbers, or claims lacking necessary context\n"
    "Example: \"Crime increased 50%\" without baseline, timeframe, or location\n"
    "\n"
    "SOURCE_VERIFICATION: Sources mentioned but not provided, or sources need verification\n"
    "Example: \"According to Harvard study\" but no link or citation\n"
    "\n"
    "MISSING_COVERAGE: Important aspects of the tweet not addressed\n"
    "Example: Tweet makes 3 claims but notes only address 1\n"
    "If no notes exist: The entire tweet implies a narrative that lacks context or factual "
    "checks.\n"
    "\n"
    "### Output Format\n"
    "Return a JSON array of gaps. Each gap should have:\n"
    "\n"
    "gap_type: One of the 6 types above (exact string match)\n"
    "description: Clear, specific explanation of the gap (1-2 sentences)\n"
    "priority: Integer 1-5, where:\n"
    "5 = Critical (factual claims without sources, major contradictions)\n"
    "4 = High (important context missing, vague references to studies)\n"
    "3 = Medium (minor missing context, secondary claims unsourced)\n"
    "2 = Low (stylistic improvements, minor details)\n"
    "1 = Very low (nice-to-have information)\n"
    "suggested_query: Specific, targeted search query to fill this gap (be precise)\n"
    "\n"
    "### Important Guidelines\n"
    "NO NOTES SCENARIO: If \"EXISTING COMMUNITY NOTES\" is empty or \"None\", treat every "
    "factual claim in the tweet as a potential UNSUBSTANTIATED_CLAIM or MISSING_CONTEXT gap "
    "needing a search query.\n"
    "Be strategic: Prioritize gaps that most impact credibility and completeness.\n"
    "Be specific: \"Study mentioned but not identified\" is better than \"needs more info\"\n"
    "Be actionable: Each gap should have a clear, searchable query.\n"
    "\n"
    "---\n"
    "Tweet (published on [date]):\n"
    "\"\"\"[tweet_text]\"\"\"\n"
    "\n"
    "Existing Community Note(s):\n"
    "\"\"\"[existing_notes]\"\"\"\n"
    "\n"
    "### Your Response\n"
    "Analyze the input above and return ONLY the JSON array. No preamble, no explanation, just "
    "the JSON.";

constexpr std::string_view kTargetedSearch =
    "You are an expert fact-checker with the ability to use web search tool, enabling you to "
    "verify information and write accurate fact-checking articles to debunk misinformation.\n"
    "\n"
    "Helpful attributes in fact-checking include:\n"
    "- Cites high-quality sources\n"
    "- Easy to understand\n"
    "- Directly addresses the post's claim\n"
    "- Provides important context\n"
    "- Neutral or unbiased language\n"
    "\n"
    "Unhelpful attributes in fact-checking include:\n"
    "- Sources not included or unreliable\n"
    "- Sources do not support note\n"
    "- Incorrect information\n"
    "- Opinion or speculation\n"
    "- Typos or unclear language\n"
    "- Misses key points or irrelevant\n"
    "- Argumentative or biased language\n"
    "- Note not needed on this post\n"
    "- Harassment or abuse\n"
    "\n"
    "### Task\n"
    "Analyze the given potentially misleading tweet and community notes (if any), and use "
    "identified information gaps for targeted web searches to retrieve relevant facts from "
    "credible sources and synthesize the provided inputs into a short, authoritative "
    "fact-checking article. The article should directly address the misleading claims in the "
    "tweet, filling the identified gaps with verified information from reliable sources.\n"
    "\n"
    "---\n"
    "Tweet (published on [date]):\n"
    "\"\"\"[tweet_text]\"\"\"\n"
    "\n"
    "Existing Community Note(s):\n"
    "\"\"\"[existing_notes]\"\"\"\n"
    "\n"
    "Identified Gaps and Suggested Queries for Effective Fact-checking:\n"
    "\"\"\"[gap_context]\"\"\"\n"
    "\n"
    "Short Fact-checking Article:";

const std::string kNoteSynthesis = std::string(
    "You are an expert fact-checker and skilled writer dedicated to producing clear, accurate, "
    "and unbiased community notes that debunk misinformation.\n\n") +
    std::string(kHelpfulAttributes) +
    "\n"
    "### Task\n"
    "You will be given a potentially misleading tweet and a fact-checking article. Your task is "
    "to create a helpful Community Note that balances perspectives reflected in helpfulness and "
    "focuses on maximizing the completeness of the note. The note should provide clear, factual "
    "context that addresses the potentially misleading information in the tweet and include "
    "full-text URLs to support factual information.\n"
    "- The note must be within 280 characters. Treat each URL as 1 character, regardless of its "
    "actual length.\n"
    "- The note must include one or more URLs to credible sources.\n"
    "- The note must be neutral, factual, and concise. When possible, cite sources across the "
    "political spectrum to strengthen neutrality, but prioritize reliability and relevance.\n"
    "- Output only the Community Note text, with URLs included. Do not add explanations, "
    "formatting, or extra commentary.\n"
    "- Do not include any information beyond what is explicitly provided in the context.\n"
    "\n"
    "---\n"
    "Tweet (published on [date]):\n"
    "\"\"\"[tweet_text]\"\"\"\n"
    "\n"
    "Fact-checking Article:\n"
    "\"\"\"[targeted_search_article]\"\"\"\n"
    "\n"
    "Community Note:";

constexpr std::string_view kJudge =
    "You are an expert evaluator of community notes. Your task is to score an AI-generated note "
    "by comparing it to a human-written helpful note and the original tweet.\n"
    "\n"
    "### Evaluation Criteria\n"
    "Functional Errors (1-5): Evaluate whether the AI note has technical or usability issues "
    "that reduce its quality, including truncated or incomplete text, broken or incomplete URLs, "
    "formatting or punctuation problems, excessive length, or the presence of reasoning or "
    "meta-level commentary. A score of 5 means no functional issues at all, while a score of 1 "
    "means severe errors that significantly impair usability.\n"
    "\n"
    "Claim Alignment (1-5): Evaluate how accurately the AI note identifies and addresses the "
    "primary claim or claims made in the tweet. The note should directly engage with what is "
    "actually being asserted or implied, focus on the aspects that require verification, and "
    "avoid shifting attention to related but different issues. Proper claim alignment also "
    "requires that the facts presented are relevant to the identified claim and help resolve "
    "it, rather than merely being topically similar. A score of 5 means the note precisely "
    "targets the core claim and supports it with relevant facts, while a score of 1 means the "
    "note misunderstands, ignores, or substitutes the main claim with an unrelated or "
    "tangential one.\n"
    "\n"
    "Fact Alignment (1-5): Judge whether the factual statements in the AI note are consistent "
    "with the human-written note, focusing on whether they describe the same underlying facts, "
    "entities, events, timelines, and claims. Different sources are acceptable if they "
    "substantively support the same facts, but the alignment must also be verifiable through "
    "the cited URLs, including that the source content actually supports the specific "
    "statements being made. Topical similarity alone is not sufficient. A score of 5 means all "
    "factual claims are fully consistent with the human note and correctly supported by the "
    "sources, while a score of 1 means the note contains contradictions, incorrect references, "
    "unsupported claims, or factual errors.\n"
    "\n"
    "Completeness (1-5): Evaluate whether the AI note fully covers the key facts and essential "
    "context needed to address the tweet's main claim, as reflected in the human-written note. "
    "The note should include all information necessary to understand and verify the claim, "
    "without major omissions or reliance on vague or indirect references. Completeness also "
    "requires that included content is relevant to the core claim and factually aligned, rather "
    "than adding extraneous details. A score of 5 means the note is comprehensive, well-scoped, "
    "and factually aligned with the human note, while a score of 1 means critical facts or "
    "context related to the claim are missing, misaligned, or insufficient to properly evaluate "
    "the claim.\n"
    "\n"
    "Helpfulness (1-5): Evaluate the overall usefulness of the AI note in helping a broad "
    "audience understand the post, following community notes standards. A helpful note clearly "
    "and directly addresses the post's claim, uses neutral and unbiased language, and provides "
    "important context supported by high-quality, reliable sources that substantiate the stated "
    "facts. The note should be easy to understand and focused on information that is actually "
    "needed for this post. A score of 5 means the note is clear, well-sourced, relevant, and "
    "informative. A score of 1 means the note is unhelpful due to missing or unreliable "
    "sources, unsupported or incorrect information, unclear or poorly written text, irrelevant "
    "or missing key points, biased or argumentative language, or because the note is "
    "unnecessary or inappropriate for the post.\n"
    "\n"
    "### Output Format\n"
    "Return ONLY the following JSON structure:\n"
    "{\n"
    "  \"functional_errors\": s1,\n"
    "  \"claim_alignment\": s2,\n"
    "  \"fact_alignment\": s3,\n"
    "  \"completeness\": s4,\n"
    "  \"helpfulness\": s5,\n"
    "  \"overall_comment\": \"<1-2 lines summarizing overall quality and suitability>\"\n"
    "}\n"
    "\n"
    "---\n"
    "Original Tweet (published on [date]):\n"
    "\"\"\"[tweet_text]\"\"\"\n"
    "\n"
    "Human-Written Helpful Note (Reference):\n"
    "\"\"\"[human_note]\"\"\"\n"
    "\n"
    "AI-Generated Note (To Evaluate):\n"
    "\"\"\"[ai_note]\"\"\"\n"
    "\n"
    "### Your Response\n"
    "Analyze the input above and return ONLY the JSON object. No preamble, no explanation, just "
    "the JSON.";

} // namespace

std::string_view supernote_lite_template() { return kSupernoteLite; }
std::string_view web_agent_template() { return kWebAgent; }
std::string_view gap_identification_template() { return kGapIdentification; }
std::string_view targeted_search_template() { return kTargetedSearch; }
std::string_view note_synthesis_template() { return kNoteSynthesis; }
std::string_view judge_template() { return kJudge; }

std::string escape_slot(std::string_view content) {
    std::string out;
    out.reserve(content.size());
    std::size_t i = 0;
    while (i < content.size()) {
        if (content[i] == '"') {
            std::size_t run = i;
            while (run < content.size() && content[run] == '"') ++run;
            const std::size_t len = run - i;
            if (len >= 3) {
                for (std::size_t k = 0; k < len; ++k) out += "\\\"";
            } else {
                out.append(len, '"');
            }
            i = run;
        } else {
            out.push_back(content[i]);
            ++i;
        }
    }
    return out;
}

std::string replace_slots(std::string_view tmpl,
                          const std::vector<std::pair<std::string_view, std::string>>& slots) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
        bool matched = false;
        for (const auto& [name, value] : slots) {
            if (tmpl.substr(i, name.size()) == name) {
                out += value;
                i += name.size();
                matched = true;
                break;
            }
        }
        if (!matched) {
            out.push_back(tmpl[i]);
            ++i;
        }
    }
    return out;
}

std::vector<std::string> parse_quoted_slots(std::string_view rendered) {
    // delimiter = three consecutive quotes whose first quote is not escaped
    std::vector<std::size_t> delims;
    std::size_t i = 0;
    while (i + 3 <= rendered.size()) {
        if (rendered[i] == '"' && rendered[i + 1] == '"' && rendered[i + 2] == '"' &&
            (i == 0 || rendered[i - 1] != '\\')) {
            delims.push_back(i);
            i += 3;
        } else {
            ++i;
        }
    }
    std::vector<std::string> slots;
    for (std::size_t k = 0; k + 1 < delims.size(); k += 2) {
        const std::size_t begin = delims[k] + 3;
        slots.emplace_back(rendered.substr(begin, delims[k + 1] - begin));
    }
    return slots;
}

std::string render_notes_block(const std::vector<CommunityNote>& notes, bool with_ratios) {
    if (notes.empty()) return std::string(kNoNotesSentinel);
    std::string out;
    for (std::size_t i = 0; i < notes.size(); ++i) {
        if (i > 0) out += "\n\n";
        out += "Note " + std::to_string(i + 1) + ": " + notes[i].text;
        if (with_ratios && notes[i].n_helpful + notes[i].n_nothelpful > 0) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.2f", helpfulness_ratio(notes[i]));
            out += "\nHelpfulness score: ";
            out += buf;
        }
    }
    return out;
}

std::string render_gap_block(const std::vector<Gap>& gaps) {
    std::string out;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        if (i > 0) out += "\n";
        out += std::string(to_string(gaps[i].gap_type)) + " | " + std::to_string(gaps[i].priority) +
               " | " + gaps[i].description + " | " + gaps[i].suggested_query;
    }
    return out;
}

} // namespace gitsearch::prompts
