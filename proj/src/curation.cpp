#include "gitsearch/curation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <unordered_map>

#include <json.hpp>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "gitsearch/errors.hpp"
#include "gitsearch/jsonl.hpp"

namespace gitsearch {

std::optional<std::string> RawNoteRow::get(const std::string& column) const {
    if (!header) return std::nullopt;
    for (std::size_t i = 0; i < header->size(); ++i) {
        if ((*header)[i] == column) {
            if (i < values.size()) return values[i];
            return std::nullopt;
        }
    }
    return std::nullopt;
}

namespace {

std::vector<std::string> split_tsv(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r') {
        fields.back().pop_back();
    }
    return fields;
}

struct TsvFile {
    std::vector<std::string> header;
    std::ifstream stream;
    std::string name;
    std::size_t line_no = 1;
};

TsvFile open_tsv(const std::filesystem::path& path) {
    TsvFile file;
    file.name = path.string();
    file.stream.open(path);
    if (!file.stream) throw Error("cannot open " + path.string());
    std::string header_line;
    if (!std::getline(file.stream, header_line)) throw Error(path.string() + " is empty");
    file.header = split_tsv(header_line);
    return file;
}

void require_columns(const TsvFile& file, const std::vector<std::string>& columns) {
    for (const std::string& column : columns) {
        if (std::find(file.header.begin(), file.header.end(), column) == file.header.end()) {
            throw MissingColumn(column + " (in " + file.name + ")");
        }
    }
}

// Streams rows, pushing malformed ones to the reject sink.
void for_each_row(TsvFile& file, const RejectSink& reject, std::int64_t& rejected,
                  const std::function<bool(const RawNoteRow&)>& fn) {
    std::string line;
    while (std::getline(file.stream, line)) {
        ++file.line_no;
        if (line.empty()) continue;
        RawNoteRow row{split_tsv(line), &file.header};
        if (row.values.size() != file.header.size()) {
            ++rejected;
            if (reject) reject(file.name, file.line_no, line, "column count mismatch");
            continue;
        }
        if (!fn(row)) {
            ++rejected;
            if (reject) reject(file.name, file.line_no, line, "unparseable field");
        }
    }
}

bool parse_bool_flag(const std::string& value) {
    return value == "1" || iequals(value, "true") || iequals(value, "yes");
}

} // namespace

Corpus ingest(const std::filesystem::path& notes_path, const std::filesystem::path& status_path,
              const std::filesystem::path& ratings_path, const std::filesystem::path& tweets_path,
              const SchemaMap& schema, const RejectSink& reject) {
    Corpus corpus;

    // notes
    TsvFile notes_file = open_tsv(notes_path);
    require_columns(notes_file,
                    {schema.notes.note_id, schema.notes.tweet_id, schema.notes.text,
                     schema.notes.created_at_millis});
    std::map<std::string, CommunityNote> notes_by_id;
    for_each_row(notes_file, reject, corpus.rejected_rows, [&](const RawNoteRow& row) {
        CommunityNote note;
        const auto id = row.get(schema.notes.note_id);
        const auto tweet_id = row.get(schema.notes.tweet_id);
        const auto text = row.get(schema.notes.text);
        const auto created = row.get(schema.notes.created_at_millis);
        if (!id || id->empty() || !tweet_id || tweet_id->empty() || !text || !created) return false;
        const auto created_ms = parse_timestamp(*created);
        if (!created_ms) return false;
        note.note_id = *id;
        note.tweet_id = *tweet_id;
        note.text = *text;
        note.created_at = *created_ms;
        note.status = NoteStatus::NMR;
        if (const auto author = row.get(schema.notes.author_id); author && !author->empty()) {
            note.author_id = *author;
        }
        if (const auto media = row.get(schema.notes.media_flag); media && parse_bool_flag(*media)) {
            note.media_flagged = true;
        }
        notes_by_id[note.note_id] = std::move(note);
        return true;
    });

    // status history: chronologically last row wins
    TsvFile status_file = open_tsv(status_path);
    require_columns(status_file, {schema.status.note_id, schema.status.status});
    std::map<std::string, TimestampMillis> last_status_ts;
    for_each_row(status_file, reject, corpus.rejected_rows, [&](const RawNoteRow& row) {
        const auto id = row.get(schema.status.note_id);
        const auto status_token = row.get(schema.status.status);
        if (!id || !status_token) return false;
        const auto it = notes_by_id.find(*id);
        if (it == notes_by_id.end()) return true; // note filtered out upstream; not an error
        TimestampMillis ts = 0;
        if (const auto raw_ts = row.get(schema.status.timestamp_millis)) {
            if (const auto parsed = parse_timestamp(*raw_ts)) ts = *parsed;
        }
        const auto status = parse_note_status(*status_token);
        if (!status) return false;
        CommunityNote& note = it->second;
        if (!note.first_status_at || ts < *note.first_status_at) note.first_status_at = ts;
        const auto last = last_status_ts.find(*id);
        if (last == last_status_ts.end() || ts >= last->second) {
            last_status_ts[*id] = ts;
            note.status = *status;
            note.last_status_at = ts;
        }
        return true;
    });

    // ratings: aggregate counts per note
    TsvFile ratings_file = open_tsv(ratings_path);
    require_columns(ratings_file, {schema.ratings.note_id, schema.ratings.helpfulness});
    for_each_row(ratings_file, reject, corpus.rejected_rows, [&](const RawNoteRow& row) {
        const auto id = row.get(schema.ratings.note_id);
        const auto level = row.get(schema.ratings.helpfulness);
        if (!id || !level) return false;
        const auto it = notes_by_id.find(*id);
        if (it == notes_by_id.end()) return true;
        if (*level == "1" || iequals(*level, "HELPFUL")) {
            ++it->second.n_helpful;
        } else if (*level == "0" || iequals(*level, "NOT_HELPFUL")) {
            ++it->second.n_nothelpful;
        }
        // intermediate levels (e.g. SOMEWHAT_HELPFUL) carry no consensus signal
        return true;
    });

    // tweets
    TsvFile tweets_file = open_tsv(tweets_path);
    require_columns(tweets_file,
                    {schema.tweets.tweet_id, schema.tweets.text, schema.tweets.created_at});
    std::map<std::string, Tweet> tweets_by_id;
    for_each_row(tweets_file, reject, corpus.rejected_rows, [&](const RawNoteRow& row) {
        Tweet tweet;
        const auto id = row.get(schema.tweets.tweet_id);
        const auto text = row.get(schema.tweets.text);
        const auto created = row.get(schema.tweets.created_at);
        if (!id || id->empty() || !text || text->empty() || !created) return false;
        const auto created_ms = parse_timestamp(*created);
        if (!created_ms) return false;
        tweet.tweet_id = *id;
        tweet.text = *text;
        tweet.published_at = *created_ms;
        if (const auto lang = row.get(schema.tweets.language); lang && !lang->empty()) {
            tweet.language_tag = *lang;
        }
        if (const auto author = row.get(schema.tweets.author_id); author && !author->empty()) {
            tweet.author_id = *author;
        }
        tweets_by_id[tweet.tweet_id] = std::move(tweet);
        return true;
    });

    // join notes to tweets; notes without a tweet row become orphans
    std::map<std::string, std::vector<CommunityNote>> notes_by_tweet;
    for (auto& [note_id, note] : notes_by_id) {
        (void)note_id;
        if (tweets_by_id.count(note.tweet_id)) {
            notes_by_tweet[note.tweet_id].push_back(note);
        } else {
            corpus.orphan_notes.push_back(note);
        }
    }
    for (auto& [tweet_id, notes] : notes_by_tweet) {
        std::sort(notes.begin(), notes.end(), [](const CommunityNote& a, const CommunityNote& b) {
            if (a.created_at != b.created_at) return a.created_at < b.created_at;
            return a.note_id < b.note_id;
        });
        corpus.entries.push_back({tweets_by_id.at(tweet_id), std::move(notes)});
    }
    std::sort(corpus.entries.begin(), corpus.entries.end(),
              [](const CorpusEntry& a, const CorpusEntry& b) {
                  return a.tweet.tweet_id < b.tweet.tweet_id;
              });
    return corpus;
}

// ---- topical filtering -----------------------------------------------------------

namespace {

bool is_word_char(unsigned char c) { return std::isalnum(c) != 0; }

} // namespace

bool keyword_filter(const std::string& note_text, const std::vector<std::string>& keywords) {
    if (note_text.empty()) return false;
    const std::string haystack = ascii_lower(note_text);
    for (const std::string& keyword : keywords) {
        const std::string needle = ascii_lower(trim(keyword));
        if (needle.empty()) continue;
        std::size_t pos = 0;
        while ((pos = haystack.find(needle, pos)) != std::string::npos) {
            const bool left_ok = pos == 0 || !is_word_char(haystack[pos - 1]);
            const std::size_t end = pos + needle.size();
            const bool right_ok = end == haystack.size() || !is_word_char(haystack[end]);
            if (left_ok && right_ok) return true;
            ++pos;
        }
    }
    return false;
}

TapeClassifier::TapeClassifier(const std::filesystem::path& path) {
    for_each_jsonl(path, [&](const Json& j) {
        scores_[j.at("text").get<std::string>()] = j.at("score").get<double>();
    });
}

double TapeClassifier::score(const std::string& text) {
    const auto it = scores_.find(text);
    if (it == scores_.end()) throw ClassifierUnavailable("no recorded score for text");
    return it->second;
}

HttpClassifier::HttpClassifier(std::string base_url) : base_url_(std::move(base_url)) {}

double HttpClassifier::score(const std::string& text) {
    httplib::Client client(base_url_);
    client.set_read_timeout(60);
    const Json body{{"text", text}};
    const auto res = client.Post("/score", body.dump(), "application/json");
    if (!res || res->status != 200) {
        throw ClassifierUnavailable("HTTP classifier at " + base_url_ + " failed");
    }
    const Json parsed = Json::parse(res->body, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("score")) {
        throw ClassifierUnavailable("classifier returned an undecodable payload");
    }
    return parsed["score"].get<double>();
}

bool zero_shot_filter(const std::string& note_text, ClassifierClient& classifier,
                      double threshold) {
    return classifier.score(note_text) >= threshold;
}

bool hybrid_filter(const std::string& note_text, const std::vector<std::string>& keywords,
                   ClassifierClient& classifier, double threshold) {
    return keyword_filter(note_text, keywords) || zero_shot_filter(note_text, classifier, threshold);
}

std::vector<std::string> load_keywords(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open keyword list " + path.string());
    std::vector<std::string> keywords;
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string phrase = trim(line);
        if (!phrase.empty()) keywords.push_back(phrase);
    }
    return keywords;
}

// ---- exclusions --------------------------------------------------------------------

std::string_view to_string(ExclusionReason reason) {
    switch (reason) {
        case ExclusionReason::MEDIA: return "media";
        case ExclusionReason::LANGUAGE: return "language";
        case ExclusionReason::DATE: return "date";
    }
    return "media";
}

bool default_english_detector(const Tweet& tweet) {
    if (!tweet.language_tag) return true;
    const std::string tag = ascii_lower(*tweet.language_tag);
    return tag == "en" || tag.rfind("en-", 0) == 0;
}

ExclusionOutcome apply_exclusions(const Corpus& corpus, const EnglishDetector& english,
                                  TimestampMillis cutoff) {
    ExclusionOutcome outcome;
    outcome.kept.orphan_notes = corpus.orphan_notes;
    outcome.kept.rejected_rows = corpus.rejected_rows;
    const EnglishDetector detector = english ? english : default_english_detector;

    for (const CorpusEntry& entry : corpus.entries) {
        const bool media = std::any_of(entry.notes.begin(), entry.notes.end(),
                                       [](const CommunityNote& n) { return n.media_flagged; });
        if (media) {
            outcome.excluded.emplace_back(entry.tweet.tweet_id, ExclusionReason::MEDIA);
            ++outcome.excluded_media;
            continue;
        }
        if (!detector(entry.tweet)) {
            outcome.excluded.emplace_back(entry.tweet.tweet_id, ExclusionReason::LANGUAGE);
            ++outcome.excluded_language;
            continue;
        }
        if (entry.tweet.published_at < cutoff) {
            outcome.excluded.emplace_back(entry.tweet.tweet_id, ExclusionReason::DATE);
            ++outcome.excluded_date;
            continue;
        }
        outcome.kept.entries.push_back(entry);
    }
    return outcome;
}

// ---- split ---------------------------------------------------------------------------

SplitResult temporal_test_split(const Corpus& corpus, double fraction) {
    if (fraction <= 0.0 || fraction >= 1.0) {
        throw Error("split fraction must be in (0,1)");
    }
    std::vector<const CorpusEntry*> eligible;
    for (const CorpusEntry& entry : corpus.entries) {
        const bool has_helpful =
            std::any_of(entry.notes.begin(), entry.notes.end(),
                        [](const CommunityNote& n) { return n.status == NoteStatus::CRH; });
        if (has_helpful) eligible.push_back(&entry);
    }
    if (eligible.empty()) throw NoHelpfulNotes();

    std::sort(eligible.begin(), eligible.end(), [](const CorpusEntry* a, const CorpusEntry* b) {
        if (a->tweet.published_at != b->tweet.published_at) {
            return a->tweet.published_at > b->tweet.published_at;
        }
        return a->tweet.tweet_id < b->tweet.tweet_id;
    });

    const std::size_t k = static_cast<std::size_t>(
        std::ceil(fraction * static_cast<double>(eligible.size())));
    std::set<std::string> test_ids;
    for (std::size_t i = 0; i < k && i < eligible.size(); ++i) {
        test_ids.insert(eligible[i]->tweet.tweet_id);
    }

    SplitResult result;
    result.eligible = static_cast<std::int64_t>(eligible.size());
    for (const CorpusEntry& entry : corpus.entries) {
        if (test_ids.count(entry.tweet.tweet_id)) {
            result.test_set.push_back(entry);
            const bool has_nmr =
                std::any_of(entry.notes.begin(), entry.notes.end(),
                            [](const CommunityNote& n) { return n.status == NoteStatus::NMR; });
            if (has_nmr) ++result.test_with_nmr;
        } else {
            result.train_pool.push_back(entry);
        }
    }
    return result;
}

// ---- statistics -----------------------------------------------------------------------

std::int64_t note_word_count(const std::string& text) {
    std::string stripped;
    stripped.reserve(text.size());
    std::size_t cursor = 0;
    for (const UrlSpan& span : find_url_spans(text)) {
        stripped += text.substr(cursor, span.begin - cursor);
        cursor = span.end;
    }
    stripped += text.substr(cursor);

    std::int64_t words = 0;
    bool in_word = false;
    for (const char c : stripped) {
        const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
        if (!space && !in_word) ++words;
        in_word = !space;
    }
    return words;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw Error("quantile of empty set");
    std::sort(values.begin(), values.end());
    if (values.size() == 1) return values[0];
    const double pos = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
}

DescriptiveStats descriptive_stats(const Corpus& corpus, const UrlNormalizationPolicy& policy) {
    DescriptiveStats stats;
    stats.n_tweets = static_cast<std::int64_t>(corpus.entries.size());

    std::vector<const CommunityNote*> all_notes;
    for (const CorpusEntry& entry : corpus.entries) {
        for (const CommunityNote& note : entry.notes) all_notes.push_back(&note);
    }
    for (const CommunityNote& note : corpus.orphan_notes) all_notes.push_back(&note);
    stats.n_notes = static_cast<std::int64_t>(all_notes.size());
    if (all_notes.empty()) return stats;

    std::int64_t crh = 0, crnh = 0, nmr = 0, citing = 0;
    std::map<std::string, std::int64_t> contributor_counts;
    std::map<std::string, std::int64_t> domain_counts;
    std::int64_t total_citations = 0;
    std::vector<double> word_lengths;
    std::vector<double> resolution_lags;

    for (const CommunityNote* note : all_notes) {
        switch (note->status) {
            case NoteStatus::CRH: ++crh; break;
            case NoteStatus::CRNH: ++crnh; break;
            case NoteStatus::NMR: ++nmr; break;
        }
        const std::vector<std::string> urls = extract_urls(note->text, policy);
        if (!urls.empty()) ++citing;
        for (const std::string& url : urls) {
            const std::string host = url_host(url);
            if (!host.empty()) {
                ++domain_counts[host];
                ++total_citations;
            }
        }
        word_lengths.push_back(static_cast<double>(note_word_count(note->text)));
        if (note->author_id) ++contributor_counts[*note->author_id];
        if (note->first_status_at && note->last_status_at &&
            *note->last_status_at >= *note->first_status_at) {
            resolution_lags.push_back(static_cast<double>(*note->last_status_at - *note->first_status_at));
        }
    }

    const double n = static_cast<double>(all_notes.size());
    stats.pct_crh = 100.0 * static_cast<double>(crh) / n;
    stats.pct_crnh = 100.0 * static_cast<double>(crnh) / n;
    stats.pct_nmr = 100.0 * static_cast<double>(nmr) / n;
    stats.pct_notes_citing = 100.0 * static_cast<double>(citing) / n;
    stats.pct_notes_without_citation = 100.0 - stats.pct_notes_citing;

    double mean = 0;
    for (const double w : word_lengths) mean += w;
    mean /= n;
    double var = 0;
    for (const double w : word_lengths) var += (w - mean) * (w - mean);
    stats.note_length_words_mean = mean;
    stats.note_length_words_sd = n > 1 ? std::sqrt(var / (n - 1)) : 0.0;

    if (!contributor_counts.empty()) {
        std::vector<double> counts;
        counts.reserve(contributor_counts.size());
        for (const auto& [author, count] : contributor_counts) {
            (void)author;
            counts.push_back(static_cast<double>(count));
        }
        stats.median_notes_per_contributor = quantile(counts, 0.5);
        stats.contributor_iqr_low = quantile(counts, 0.25);
        stats.contributor_iqr_high = quantile(counts, 0.75);
    }

    std::vector<std::pair<std::string, std::int64_t>> domains(domain_counts.begin(),
                                                              domain_counts.end());
    std::sort(domains.begin(), domains.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    for (std::size_t i = 0; i < domains.size() && i < 5; ++i) {
        stats.top_domains.emplace_back(
            domains[i].first,
            100.0 * static_cast<double>(domains[i].second) / static_cast<double>(total_citations));
    }

    std::vector<double> first_note_lags;
    for (const CorpusEntry& entry : corpus.entries) {
        if (entry.notes.empty()) continue;
        TimestampMillis first = entry.notes.front().created_at;
        for (const CommunityNote& note : entry.notes) {
            first = std::min(first, note.created_at);
        }
        first_note_lags.push_back(static_cast<double>(first - entry.tweet.published_at));
    }
    if (!first_note_lags.empty()) {
        stats.median_tweet_to_first_note_ms = quantile(first_note_lags, 0.5);
    }
    if (!resolution_lags.empty()) {
        stats.median_note_to_resolution_ms = quantile(resolution_lags, 0.5);
    }

    std::set<std::string> joined_ids, orphan_ids;
    for (const CorpusEntry& entry : corpus.entries) joined_ids.insert(entry.tweet.tweet_id);
    for (const CommunityNote& note : corpus.orphan_notes) orphan_ids.insert(note.tweet_id);
    const double total_tweets = static_cast<double>(joined_ids.size() + orphan_ids.size());
    if (total_tweets > 0) {
        stats.pct_deleted_tweets = 100.0 * static_cast<double>(orphan_ids.size()) / total_tweets;
    }
    return stats;
}

// ---- filter quality ---------------------------------------------------------------------

FilterQuality filter_quality(const std::vector<bool>& predictions,
                             const std::vector<bool>& labels) {
    if (predictions.size() != labels.size()) {
        throw LengthMismatch(predictions.size(), labels.size());
    }
    std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i] && labels[i]) ++tp;
        else if (predictions[i] && !labels[i]) ++fp;
        else if (!predictions[i] && labels[i]) ++fn;
        else ++tn;
    }
    const auto safe_div = [](double num, double den) { return den > 0 ? num / den : 0.0; };
    const auto f1 = [&](double p, double r) { return p + r > 0 ? 2 * p * r / (p + r) : 0.0; };

    FilterQuality q;
    q.us_precision = safe_div(static_cast<double>(tp), static_cast<double>(tp + fp));
    q.us_recall = safe_div(static_cast<double>(tp), static_cast<double>(tp + fn));
    q.us_f1 = f1(q.us_precision, q.us_recall);
    q.other_precision = safe_div(static_cast<double>(tn), static_cast<double>(tn + fn));
    q.other_recall = safe_div(static_cast<double>(tn), static_cast<double>(tn + fp));
    q.other_f1 = f1(q.other_precision, q.other_recall);
    q.macro_f1 = (q.us_f1 + q.other_f1) / 2.0;
    return q;
}

} // namespace gitsearch
