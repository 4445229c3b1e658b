#include "gitsearch/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <future>
#include <set>
#include <sstream>

#include "gitsearch/baselines.hpp"
#include "gitsearch/gap_analysis.hpp"
#include "gitsearch/jsonl.hpp"
#include "gitsearch/judge.hpp"
#include "gitsearch/metrics.hpp"
#include "gitsearch/note_synthesis.hpp"

namespace gitsearch {

namespace {

std::string fmt(double value, int precision = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, value);
    return buf;
}

Json meta_record(const RunConfig& config, std::string_view artifact, TimestampMillis now) {
    return Json{{"_meta",
                 Json{{"artifact", std::string(artifact)},
                      {"config_digest", config.config_digest},
                      {"version", std::string(kVersion)},
                      {"created_at", now}}}};
}

/// Opens an append-mode artifact writer, adding the header record when the
/// file is new or empty.
JsonlWriter open_artifact(const RunConfig& config, std::string_view artifact, TimestampMillis now) {
    const auto path = config.run_dir / artifact;
    const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    JsonlWriter writer(path);
    if (fresh) writer.append(meta_record(config, artifact, now));
    return writer;
}

std::shared_ptr<Gateway> make_gateway(const RunConfig& config) {
    std::shared_ptr<Transport> transport;
    if (config.mode == GatewayMode::LIVE || config.mode == GatewayMode::RECORD) {
        transport = std::make_shared<HttpTransport>(config.providers);
    }
    return std::make_shared<Gateway>(config.mode, config.run_dir / artifacts::kTapesDir, transport,
                                     config.url_policy, RetryPolicy{}, config.concurrency);
}

std::vector<std::string> read_id_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw StageMissing(path.string());
    std::vector<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        const std::string id = trim(line);
        if (!id.empty() && id[0] != '#') ids.push_back(id);
    }
    return ids;
}

/// Tweets to process: explicit ids, else the split manifest, else the corpus.
std::vector<CorpusEntry> select_entries(const Corpus& corpus, const RunConfig& config,
                                        const std::vector<std::string>& tweet_ids) {
    std::vector<std::string> wanted = tweet_ids;
    if (wanted.empty()) {
        const auto manifest = config.run_dir / artifacts::kTestIds;
        if (std::filesystem::exists(manifest)) wanted = read_id_file(manifest);
    }
    if (wanted.empty()) return corpus.entries;

    std::set<std::string> want(wanted.begin(), wanted.end());
    std::vector<CorpusEntry> selected;
    for (const CorpusEntry& entry : corpus.entries) {
        if (want.count(entry.tweet.tweet_id)) selected.push_back(entry);
    }
    return selected;
}

/// (tweet_id, method) pairs already present in a notes/judge file.
std::set<std::pair<std::string, std::string>> completed_pairs(const std::filesystem::path& path) {
    std::set<std::pair<std::string, std::string>> done;
    if (!std::filesystem::exists(path)) return done;
    for_each_jsonl(path, [&](const Json& j) {
        done.emplace(j.value("tweet_id", ""), j.value("method", ""));
    });
    return done;
}

std::set<std::string> completed_ok_pipeline(const std::filesystem::path& path) {
    std::set<std::string> done;
    if (!std::filesystem::exists(path)) return done;
    for_each_jsonl(path, [&](const Json& j) {
        if (j.value("status", "") == "OK") done.insert(j.value("tweet_id", ""));
    });
    return done;
}

/// Permanent baseline failures recorded earlier (e.g. ColdStart) also count
/// as completed work on resume.
std::set<std::string> recorded_errors(const std::filesystem::path& path, const std::string& method,
                                      const std::string& error) {
    std::set<std::string> done;
    if (!std::filesystem::exists(path)) return done;
    for_each_jsonl(path, [&](const Json& j) {
        if (j.value("method", "") == method && j.value("error", "") == error) {
            done.insert(j.value("tweet_id", ""));
        }
    });
    return done;
}

/// Applies `fn` to items with up to `concurrency` tasks in flight; results
/// are returned in input order.
template <typename T, typename F>
auto map_ordered(const std::vector<T>& items, int concurrency, F&& fn) {
    using R = std::invoke_result_t<F&, const T&>;
    std::vector<R> results;
    results.reserve(items.size());
    if (concurrency <= 1) {
        for (const T& item : items) results.push_back(fn(item));
        return results;
    }
    std::vector<std::future<R>> futures(items.size());
    std::size_t launched = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        while (launched < items.size() &&
               launched < i + static_cast<std::size_t>(concurrency)) {
            const std::size_t idx = launched++;
            futures[idx] = std::async(std::launch::async,
                                      [&items, &fn, idx] { return fn(items[idx]); });
        }
        results.push_back(futures[i].get());
    }
    return results;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    fields.push_back(field);
    return fields;
}

} // namespace

TimestampMillis run_clock(const RunConfig& config) {
    if (config.mode == GatewayMode::REPLAY || config.mode == GatewayMode::OFFLINE) return 0;
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

Corpus load_corpus(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw StageMissing(path.string());
    Corpus corpus;
    for_each_jsonl(path, [&](const Json& j) {
        if (j.contains("orphan_note")) {
            corpus.orphan_notes.push_back(j.at("orphan_note").get<CommunityNote>());
            return;
        }
        CorpusEntry entry;
        entry.tweet = j.at("tweet").get<Tweet>();
        entry.notes = j.at("notes").get<std::vector<CommunityNote>>();
        corpus.entries.push_back(std::move(entry));
    });
    return corpus;
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path,
                  const RunConfig& config, TimestampMillis now) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << meta_record(config, "corpus.jsonl", now).dump() << '\n';
    for (const CorpusEntry& entry : corpus.entries) {
        out << Json{{"tweet", entry.tweet}, {"notes", entry.notes}}.dump() << '\n';
    }
    for (const CommunityNote& note : corpus.orphan_notes) {
        out << Json{{"orphan_note", note}}.dump() << '\n';
    }
}

std::map<std::string, CommunityNote> reference_notes(const Corpus& corpus) {
    std::map<std::string, CommunityNote> refs;
    for (const CorpusEntry& entry : corpus.entries) {
        const CommunityNote* best = nullptr;
        for (const CommunityNote& note : entry.notes) {
            if (note.status != NoteStatus::CRH) continue;
            if (!best || note.n_helpful > best->n_helpful ||
                (note.n_helpful == best->n_helpful &&
                 (note.created_at < best->created_at ||
                  (note.created_at == best->created_at && note.note_id < best->note_id)))) {
                best = &note;
            }
        }
        if (best) refs.emplace(entry.tweet.tweet_id, *best);
    }
    return refs;
}

std::vector<CommunityNote> candidate_notes(const CorpusEntry& entry) {
    std::vector<CommunityNote> candidates;
    for (const CommunityNote& note : entry.notes) {
        if (note.status == NoteStatus::NMR) candidates.push_back(note);
    }
    return candidates;
}

// ---- curate -------------------------------------------------------------------

CommandOutcome cmd_curate(const RunConfig& config) {
    CommandOutcome outcome;
    const TimestampMillis now = run_clock(config);
    std::filesystem::create_directories(config.run_dir);

    std::ofstream rejects(config.run_dir / artifacts::kRejects, std::ios::trunc);
    rejects << "file\tline\twhy\tcontent\n";
    const RejectSink reject_sink = [&](const std::string& file, std::size_t line_no,
                                       const std::string& line, const std::string& why) {
        rejects << file << '\t' << line_no << '\t' << why << '\t' << line << '\n';
    };

    const Corpus ingested = ingest(config.notes_tsv, config.status_tsv, config.ratings_tsv,
                                   config.tweets_tsv, config.schema, reject_sink);

    CurationReport report;
    report.tweets_ingested = static_cast<std::int64_t>(ingested.entries.size());
    for (const CorpusEntry& e : ingested.entries) {
        report.notes_ingested += static_cast<std::int64_t>(e.notes.size());
    }
    report.notes_ingested += static_cast<std::int64_t>(ingested.orphan_notes.size());
    report.rejected_rows = ingested.rejected_rows;

    // topical filter: a tweet stays when any of its notes matches
    std::unique_ptr<ClassifierClient> classifier;
    if (!config.classifier_tape.empty()) {
        classifier = std::make_unique<TapeClassifier>(config.classifier_tape);
    } else if (!config.classifier_url.empty()) {
        classifier = std::make_unique<HttpClassifier>(config.classifier_url);
    }
    const std::vector<std::string> keywords =
        config.keywords_file.empty() ? std::vector<std::string>{}
                                     : load_keywords(config.keywords_file);

    Corpus topical;
    topical.orphan_notes = ingested.orphan_notes;
    topical.rejected_rows = ingested.rejected_rows;
    for (const CorpusEntry& entry : ingested.entries) {
        bool by_classifier = false;
        bool by_keywords = false;
        for (const CommunityNote& note : entry.notes) {
            if (!by_keywords && !keywords.empty() && keyword_filter(note.text, keywords)) {
                by_keywords = true;
            }
            if (!by_classifier && classifier &&
                zero_shot_filter(note.text, *classifier, config.classifier_threshold)) {
                by_classifier = true;
            }
            if (by_classifier && by_keywords) break;
        }
        if (by_classifier) ++report.tweets_matched_classifier;
        if (by_keywords) ++report.tweets_matched_keywords;
        // with neither filter configured everything passes through
        const bool matched = (!classifier && keywords.empty()) || by_classifier || by_keywords;
        if (matched) {
            ++report.tweets_matched_union;
            topical.entries.push_back(entry);
        }
    }
    if (!classifier && keywords.empty()) {
        report.tweets_matched_union = static_cast<std::int64_t>(topical.entries.size());
    }

    const ExclusionOutcome excluded =
        apply_exclusions(topical, default_english_detector, config.cutoff_date);
    report.excluded_media = excluded.excluded_media;
    report.excluded_language = excluded.excluded_language;
    report.excluded_date = excluded.excluded_date;
    report.tweets_final = static_cast<std::int64_t>(excluded.kept.entries.size());
    for (const CorpusEntry& e : excluded.kept.entries) {
        report.notes_final += static_cast<std::int64_t>(e.notes.size());
    }
    report.stats = descriptive_stats(excluded.kept, config.url_policy);

    write_corpus(excluded.kept, config.run_dir / artifacts::kCorpus, config, now);

    Json report_json{{"_meta", meta_record(config, "curation_report.json", now)["_meta"]},
                     {"tweets_ingested", report.tweets_ingested},
                     {"notes_ingested", report.notes_ingested},
                     {"rejected_rows", report.rejected_rows},
                     {"tweets_matched_classifier", report.tweets_matched_classifier},
                     {"tweets_matched_keywords", report.tweets_matched_keywords},
                     {"tweets_matched_union", report.tweets_matched_union},
                     {"excluded_media", report.excluded_media},
                     {"excluded_language", report.excluded_language},
                     {"excluded_date", report.excluded_date},
                     {"tweets_final", report.tweets_final},
                     {"notes_final", report.notes_final}};
    Json exclusions = Json::array();
    for (const auto& [tweet_id, reason] : excluded.excluded) {
        exclusions.push_back(Json{{"tweet_id", tweet_id}, {"reason", std::string(to_string(reason))}});
    }
    report_json["exclusions"] = std::move(exclusions);

    const DescriptiveStats& s = report.stats;
    Json stats{{"n_tweets", s.n_tweets},
               {"n_notes", s.n_notes},
               {"pct_crh", s.pct_crh},
               {"pct_crnh", s.pct_crnh},
               {"pct_nmr", s.pct_nmr},
               {"note_length_words_mean", s.note_length_words_mean},
               {"note_length_words_sd", s.note_length_words_sd},
               {"pct_notes_citing", s.pct_notes_citing},
               {"pct_notes_without_citation", s.pct_notes_without_citation},
               {"pct_deleted_tweets", s.pct_deleted_tweets}};
    if (s.median_notes_per_contributor) {
        stats["median_notes_per_contributor"] = *s.median_notes_per_contributor;
        stats["contributor_iqr"] = Json::array({*s.contributor_iqr_low, *s.contributor_iqr_high});
    }
    if (s.median_tweet_to_first_note_ms) {
        stats["median_tweet_to_first_note_ms"] = *s.median_tweet_to_first_note_ms;
    }
    if (s.median_note_to_resolution_ms) {
        stats["median_note_to_resolution_ms"] = *s.median_note_to_resolution_ms;
    }
    Json domains = Json::array();
    for (const auto& [domain, pct] : s.top_domains) {
        domains.push_back(Json{{"domain", domain}, {"pct_of_citations", pct}});
    }
    stats["top_domains"] = std::move(domains);
    report_json["stats"] = std::move(stats);

    std::ofstream report_out(config.run_dir / artifacts::kCurationReport, std::ios::trunc);
    report_out << report_json.dump(2) << '\n';

    outcome.items_done = report.tweets_final;
    return outcome;
}

// ---- split ---------------------------------------------------------------------

CommandOutcome cmd_split(const RunConfig& config) {
    CommandOutcome outcome;
    const Corpus corpus = load_corpus(config.corpus_path.empty()
                                          ? config.run_dir / artifacts::kCorpus
                                          : config.corpus_path);
    const SplitResult split = temporal_test_split(corpus, config.split_fraction);

    std::ofstream out(config.run_dir / artifacts::kTestIds, std::ios::trunc);
    out << "# eligible_tweets=" << split.eligible
        << " test_size=" << split.test_set.size()
        << " test_with_candidate_notes=" << split.test_with_nmr << '\n';
    for (const CorpusEntry& entry : split.test_set) {
        out << entry.tweet.tweet_id << '\n';
    }
    outcome.items_done = static_cast<std::int64_t>(split.test_set.size());
    return outcome;
}

// ---- pipeline -------------------------------------------------------------------

namespace {

Json pipeline_record_json(const PipelineRecord& record) {
    Json j{{"tweet_id", record.tweet_id},
           {"status", record.ok ? "OK" : "FAILED"},
           {"timings_ms", record.timings_ms}};
    if (!record.ok) {
        if (record.failed_phase) j["failed_phase"] = std::string(to_string(*record.failed_phase));
        j["error"] = record.error;
    }
    return j;
}

Json error_record(const std::string& tweet_id, const std::string& stage, const std::string& error,
                  const std::string& message) {
    return Json{{"tweet_id", tweet_id}, {"method", stage}, {"error", error}, {"message", message}};
}

} // namespace

CommandOutcome cmd_pipeline(const RunConfig& config, const std::vector<std::string>& tweet_ids) {
    CommandOutcome outcome;
    const TimestampMillis now = run_clock(config);
    const Corpus corpus = load_corpus(config.corpus_path.empty()
                                          ? config.run_dir / artifacts::kCorpus
                                          : config.corpus_path);
    const std::vector<CorpusEntry> all = select_entries(corpus, config, tweet_ids);
    const std::set<std::string> done =
        completed_ok_pipeline(config.run_dir / artifacts::kPipeline);

    std::vector<CorpusEntry> pending;
    for (const CorpusEntry& entry : all) {
        if (done.count(entry.tweet.tweet_id)) {
            ++outcome.items_skipped;
        } else {
            pending.push_back(entry);
        }
    }
    if (pending.empty()) return outcome;

    const auto gateway = make_gateway(config);
    const PipelineModels models{config.phase1_model, config.phase2_model, config.phase3_model};

    JsonlWriter gaps_out = open_artifact(config, artifacts::kGaps, now);
    JsonlWriter articles_out = open_artifact(config, artifacts::kArticles, now);
    JsonlWriter notes_out = open_artifact(config, artifacts::kNotes, now);
    JsonlWriter pipeline_out = open_artifact(config, artifacts::kPipeline, now);
    JsonlWriter errors_out = open_artifact(config, artifacts::kErrors, now);

    const auto persist = [&](const PipelineRecord& record) {
        if (record.gap_report) gaps_out.append(*record.gap_report);
        if (record.article) articles_out.append(*record.article);
        if (record.note) notes_out.append(*record.note);
        pipeline_out.append(pipeline_record_json(record));
        if (record.ok) {
            ++outcome.items_done;
        } else {
            ++outcome.soft_failures;
            const std::string phase =
                record.failed_phase ? std::string(to_string(*record.failed_phase)) : "?";
            errors_out.append(error_record(record.tweet_id, "GITSEARCH",
                                           "PhaseFailure(" + phase + ")", record.error));
        }
    };

    if (config.concurrency <= 1) {
        // write-through sinks: each artifact lands before the next phase starts
        for (const CorpusEntry& entry : pending) {
            PipelineSink sink;
            sink.on_gap_report = [&](const GapReport& r) { gaps_out.append(r); };
            sink.on_article = [&](const EvidenceArticle& a) { articles_out.append(a); };
            sink.on_note = [&](const SynthesizedNote& n) { notes_out.append(n); };
            PipelineRecord record = run_pipeline(entry.tweet, candidate_notes(entry), *gateway,
                                                 models, config.url_policy, now, sink);
            pipeline_out.append(pipeline_record_json(record));
            if (record.ok) {
                ++outcome.items_done;
            } else {
                ++outcome.soft_failures;
                const std::string phase =
                    record.failed_phase ? std::string(to_string(*record.failed_phase)) : "?";
                errors_out.append(error_record(record.tweet_id, "GITSEARCH",
                                               "PhaseFailure(" + phase + ")", record.error));
            }
        }
    } else {
        // concurrent tweets, artifacts appended in input order
        const auto records = map_ordered(pending, config.concurrency, [&](const CorpusEntry& entry) {
            return run_pipeline(entry.tweet, candidate_notes(entry), *gateway, models,
                                config.url_policy, now);
        });
        for (const PipelineRecord& record : records) persist(record);
    }
    return outcome;
}

// ---- baseline --------------------------------------------------------------------

CommandOutcome cmd_baseline(const RunConfig& config, const std::string& method_tag,
                            const std::vector<std::string>& tweet_ids) {
    Method method;
    if (method_tag == "supernotes-lite" || method_tag == "SUPERNOTES_LITE") {
        method = Method::SUPERNOTES_LITE;
    } else if (method_tag == "web-agent" || method_tag == "WEB_AGENT") {
        method = Method::WEB_AGENT;
    } else {
        throw UnknownMethod(method_tag);
    }

    CommandOutcome outcome;
    const TimestampMillis now = run_clock(config);
    const Corpus corpus = load_corpus(config.corpus_path.empty()
                                          ? config.run_dir / artifacts::kCorpus
                                          : config.corpus_path);
    const std::vector<CorpusEntry> all = select_entries(corpus, config, tweet_ids);

    const std::string tag(to_string(method));
    const auto done = completed_pairs(config.run_dir / artifacts::kNotes);
    const auto cold = recorded_errors(config.run_dir / artifacts::kErrors, tag, "ColdStart");

    std::vector<CorpusEntry> pending;
    for (const CorpusEntry& entry : all) {
        if (done.count({entry.tweet.tweet_id, tag}) || cold.count(entry.tweet.tweet_id)) {
            ++outcome.items_skipped;
        } else {
            pending.push_back(entry);
        }
    }
    if (pending.empty()) return outcome;

    const auto gateway = make_gateway(config);
    JsonlWriter notes_out = open_artifact(config, artifacts::kNotes, now);
    JsonlWriter errors_out = open_artifact(config, artifacts::kErrors, now);

    struct BaselineResult {
        std::optional<SynthesizedNote> note;
        std::string error_kind;
        std::string message;
    };
    const auto results = map_ordered(pending, config.concurrency, [&](const CorpusEntry& entry) {
        BaselineResult result;
        try {
            if (method == Method::SUPERNOTES_LITE) {
                result.note = supernotes_lite(entry.tweet, candidate_notes(entry), *gateway,
                                              config.supernote_model, config.url_policy, now);
            } else {
                result.note = web_agent(entry.tweet, *gateway, config.webagent_model,
                                        config.url_policy, now);
            }
        } catch (const ColdStart& e) {
            result.error_kind = "ColdStart";
            result.message = e.what();
        } catch (const std::exception& e) {
            result.error_kind = "BackendFailure";
            result.message = e.what();
        }
        return result;
    });

    for (std::size_t i = 0; i < pending.size(); ++i) {
        const BaselineResult& result = results[i];
        if (result.note) {
            notes_out.append(*result.note);
            ++outcome.items_done;
        } else {
            errors_out.append(error_record(pending[i].tweet.tweet_id, tag, result.error_kind,
                                           result.message));
            ++outcome.soft_failures;
        }
    }
    return outcome;
}

// ---- metrics ---------------------------------------------------------------------

namespace {

std::vector<SynthesizedNote> load_notes(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw StageMissing(path.string());
    std::vector<SynthesizedNote> notes;
    for_each_jsonl(path, [&](const Json& j) { notes.push_back(j.get<SynthesizedNote>()); });
    return notes;
}

} // namespace

CommandOutcome cmd_metrics(const RunConfig& config, const std::filesystem::path& notes_path) {
    CommandOutcome outcome;
    const Corpus corpus = load_corpus(config.corpus_path.empty()
                                          ? config.run_dir / artifacts::kCorpus
                                          : config.corpus_path);
    const auto notes =
        load_notes(notes_path.empty() ? config.run_dir / artifacts::kNotes : notes_path);
    const auto references = reference_notes(corpus);

    const CorpusScores scores = score_corpus(notes, references, config.url_policy);

    std::ofstream metrics_out(config.run_dir / artifacts::kMetricsCsv, std::ios::trunc);
    metrics_out << "tweet_id,method,rouge_l,url_recall,n_urls,char_count,effective_length\n";
    for (const MetricReport& r : scores.reports) {
        metrics_out << r.tweet_id << ',' << to_string(r.method) << ',' << fmt(r.rouge_l) << ','
                    << (r.url_recall ? fmt(*r.url_recall) : std::string{}) << ',' << r.n_urls
                    << ',' << r.char_count << ',' << r.effective_length << '\n';
    }

    std::ofstream summary_out(config.run_dir / artifacts::kSummaryCsv, std::ios::trunc);
    summary_out << "method,n_notes,rouge_l_mean,url_recall_mean,url_recall_excluded,"
                   "n_urls_mean,char_count_mean,effective_length_mean\n";
    for (const MethodSummary& s : scores.summary) {
        summary_out << to_string(s.method) << ',' << s.n_notes << ',' << fmt(s.rouge_l_mean) << ','
                    << (s.url_recall_mean ? fmt(*s.url_recall_mean) : std::string{}) << ','
                    << s.url_recall_excluded << ',' << fmt(s.n_urls_mean) << ','
                    << fmt(s.char_count_mean) << ',' << fmt(s.effective_length_mean) << '\n';
    }
    outcome.items_done = static_cast<std::int64_t>(scores.reports.size());
    return outcome;
}

// ---- judge ------------------------------------------------------------------------

namespace {

int method_rank(Method m) {
    switch (m) {
        case Method::GITSEARCH: return 0;
        case Method::SUPERNOTES_LITE: return 1;
        case Method::WEB_AGENT: return 2;
        case Method::HUMAN: return 3;
    }
    return 3;
}

Json judge_row(const std::string& tweet_id, Method method, const JudgeScores& scores,
               const std::string& model_id) {
    return Json{{"tweet_id", tweet_id},
                {"method", std::string(to_string(method))},
                {"functional_errors", scores.functional_errors},
                {"claim_alignment", scores.claim_alignment},
                {"fact_alignment", scores.fact_alignment},
                {"completeness", scores.completeness},
                {"helpfulness", scores.helpfulness},
                {"overall_comment", scores.overall_comment},
                {"model_id", model_id}};
}

std::map<std::string, std::map<std::string, JudgeScores>> load_judge_scores(
    const std::filesystem::path& path) {
    std::map<std::string, std::map<std::string, JudgeScores>> by_method;
    if (!std::filesystem::exists(path)) return by_method;
    for_each_jsonl(path, [&](const Json& j) {
        JudgeScores scores;
        scores.functional_errors = j.at("functional_errors").get<int>();
        scores.claim_alignment = j.at("claim_alignment").get<int>();
        scores.fact_alignment = j.at("fact_alignment").get<int>();
        scores.completeness = j.at("completeness").get<int>();
        scores.helpfulness = j.at("helpfulness").get<int>();
        scores.overall_comment = j.value("overall_comment", "");
        by_method[j.at("method").get<std::string>()][j.at("tweet_id").get<std::string>()] = scores;
    });
    return by_method;
}

void write_deltas_csv(const std::filesystem::path& path,
                      const std::map<std::string, std::map<std::string, JudgeScores>>& by_method) {
    std::vector<std::string> tags;
    for (const auto& [tag, _] : by_method) tags.push_back(tag);
    std::sort(tags.begin(), tags.end(), [](const std::string& a, const std::string& b) {
        return method_rank(*parse_method(a)) < method_rank(*parse_method(b));
    });

    std::ofstream out(path, std::ios::trunc);
    out << "method_a,method_b,dimension,n,mean_a,mean_b,delta,p_value,stars\n";
    for (std::size_t i = 0; i < tags.size(); ++i) {
        for (std::size_t j = i + 1; j < tags.size(); ++j) {
            const auto& a_all = by_method.at(tags[i]);
            const auto& b_all = by_method.at(tags[j]);
            std::map<std::string, JudgeScores> a, b;
            for (const auto& [tweet_id, scores] : a_all) {
                const auto it = b_all.find(tweet_id);
                if (it != b_all.end()) {
                    a[tweet_id] = scores;
                    b[tweet_id] = it->second;
                }
            }
            if (a.size() < 2) continue; // not enough aligned tweets for a test
            for (const DeltaReport& d : compare_systems(a, b)) {
                out << tags[i] << ',' << tags[j] << ',' << d.dimension << ',' << d.n_a << ','
                    << fmt(d.mean_a) << ',' << fmt(d.mean_b) << ',' << fmt(d.delta) << ','
                    << fmt(d.p_value, 9) << ',' << to_string(d.stars) << '\n';
            }
        }
    }
}

} // namespace

CommandOutcome cmd_judge(const RunConfig& config, const std::filesystem::path& notes_path) {
    CommandOutcome outcome;
    const TimestampMillis now = run_clock(config);
    const Corpus corpus = load_corpus(config.corpus_path.empty()
                                          ? config.run_dir / artifacts::kCorpus
                                          : config.corpus_path);
    const auto notes =
        load_notes(notes_path.empty() ? config.run_dir / artifacts::kNotes : notes_path);
    const auto references = reference_notes(corpus);

    std::map<std::string, Tweet> tweets;
    for (const CorpusEntry& entry : corpus.entries) {
        tweets.emplace(entry.tweet.tweet_id, entry.tweet);
    }

    const auto done = completed_pairs(config.run_dir / artifacts::kJudge);
    std::vector<SynthesizedNote> pending;
    for (const SynthesizedNote& note : notes) {
        if (note.method == Method::HUMAN) continue;
        if (done.count({note.tweet_id, std::string(to_string(note.method))})) {
            ++outcome.items_skipped;
            continue;
        }
        pending.push_back(note);
    }
    std::sort(pending.begin(), pending.end(),
              [](const SynthesizedNote& a, const SynthesizedNote& b) {
                  if (a.tweet_id != b.tweet_id) return a.tweet_id < b.tweet_id;
                  return method_rank(a.method) < method_rank(b.method);
              });

    JsonlWriter judge_out = open_artifact(config, artifacts::kJudge, now);
    JsonlWriter errors_out = open_artifact(config, artifacts::kErrors, now);

    if (!pending.empty()) {
        const auto gateway = make_gateway(config);
        struct JudgeResult {
            std::optional<JudgeScores> scores;
            std::string message;
        };
        const auto results =
            map_ordered(pending, config.concurrency, [&](const SynthesizedNote& note) {
                JudgeResult result;
                try {
                    const auto ref = references.find(note.tweet_id);
                    if (ref == references.end()) throw MissingReference(note.tweet_id);
                    const auto tweet = tweets.find(note.tweet_id);
                    if (tweet == tweets.end()) throw MissingReference(note.tweet_id);
                    result.scores = judge_note(tweet->second, ref->second, note, *gateway,
                                               config.judge_model);
                } catch (const std::exception& e) {
                    result.message = e.what();
                }
                return result;
            });
        for (std::size_t i = 0; i < pending.size(); ++i) {
            if (results[i].scores) {
                judge_out.append(judge_row(pending[i].tweet_id, pending[i].method,
                                           *results[i].scores, config.judge_model));
                ++outcome.items_done;
            } else {
                errors_out.append(error_record(pending[i].tweet_id,
                                               std::string(to_string(pending[i].method)),
                                               "JudgeFailure", results[i].message));
                ++outcome.soft_failures;
            }
        }
    }

    write_deltas_csv(config.run_dir / artifacts::kDeltasCsv,
                     load_judge_scores(config.run_dir / artifacts::kJudge));
    return outcome;
}

// ---- report -----------------------------------------------------------------------

namespace {

struct RankingsData {
    std::vector<MethodRanking> rankings;
    // per method: criterion -> (sum, count) over answer columns
    std::map<std::string, std::map<std::string, std::pair<double, std::int64_t>>> answers;
};

RankingsData load_rankings_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw StageMissing(path.string());
    RankingsData data;
    std::string line;
    if (!std::getline(in, line)) throw Error("rankings file is empty");
    const std::vector<std::string> header = split_csv_line(line);
    const auto column = [&](const std::string& name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        return std::nullopt;
    };
    const auto tweet_col = column("tweet_id");
    const auto method_col = column("method");
    const auto rank_col = column("rank");
    if (!tweet_col || !method_col || !rank_col) {
        throw MissingColumn("rankings CSV needs tweet_id, method, rank");
    }
    static constexpr std::array<std::string_view, 7> kAnswerCols{"F1", "F2", "F3", "F4",
                                                                 "C1", "C2", "H"};

    std::map<std::string, MethodRanking> by_tweet;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size()) throw Error("malformed rankings row: " + line);
        const std::string tweet_id = fields[*tweet_col];
        const std::string method_tag = fields[*method_col];
        const auto method = parse_method(method_tag);
        if (!method) throw UnknownMethod(method_tag);
        int rank = 0;
        try {
            rank = std::stoi(fields[*rank_col]);
        } catch (const std::exception&) {
            throw Error("rank is not an integer in row: " + line);
        }
        MethodRanking& ranking = by_tweet[tweet_id];
        ranking.tweet_id = tweet_id;
        ranking.ranks.emplace_back(*method, rank);

        for (const std::string_view name : kAnswerCols) {
            const auto col = column(std::string(name));
            if (!col) continue;
            const std::string value = trim(fields[*col]);
            if (value.empty()) continue;
            double numeric = 0.0;
            if (iequals(value, "yes")) numeric = 1.0;
            else if (iequals(value, "no")) numeric = 0.0;
            else numeric = std::stod(value);
            auto& [sum, count] = data.answers[method_tag][std::string(name)];
            sum += numeric;
            ++count;
        }
    }
    for (auto& [tweet_id, ranking] : by_tweet) {
        (void)tweet_id;
        data.rankings.push_back(std::move(ranking));
    }
    return data;
}

} // namespace

CommandOutcome cmd_report(const RunConfig& config) {
    CommandOutcome outcome;
    const TimestampMillis now = run_clock(config);
    const Corpus corpus = load_corpus(config.corpus_path.empty()
                                          ? config.run_dir / artifacts::kCorpus
                                          : config.corpus_path);
    const auto references = reference_notes(corpus);
    const auto notes = load_notes(config.run_dir / artifacts::kNotes);
    const CorpusScores scores = score_corpus(notes, references, config.url_policy);
    const auto judge_scores = load_judge_scores(config.run_dir / artifacts::kJudge);

    struct Flags {
        std::int64_t over_budget = 0, no_url = 0, hallucinated = 0;
    };
    std::map<std::string, Flags> flags;
    for (const SynthesizedNote& note : notes) {
        Flags& f = flags[std::string(to_string(note.method))];
        if (note.over_budget) ++f.over_budget;
        if (note.no_url) ++f.no_url;
        if (note.hallucinated_url) ++f.hallucinated;
    }

    Json methods_json = Json::array();
    std::vector<std::string> lines;
    for (const MethodSummary& s : scores.summary) {
        const std::string tag(to_string(s.method));
        Json row{{"method", tag},
                 {"n_notes", s.n_notes},
                 {"rouge_l", s.rouge_l_mean},
                 {"bert_score", "not computed"},
                 {"n_urls_mean", s.n_urls_mean},
                 {"char_count_mean", s.char_count_mean},
                 {"effective_length_mean", s.effective_length_mean},
                 {"url_recall_excluded", s.url_recall_excluded},
                 {"over_budget", flags[tag].over_budget},
                 {"no_url", flags[tag].no_url},
                 {"hallucinated_url", flags[tag].hallucinated}};
        if (s.url_recall_mean) row["url_recall"] = *s.url_recall_mean;
        const auto judged = judge_scores.find(tag);
        if (judged != judge_scores.end() && !judged->second.empty()) {
            const double n = static_cast<double>(judged->second.size());
            for (const std::string_view dim : kJudgeDimensions) {
                double sum = 0;
                for (const auto& [tweet_id, sc] : judged->second) {
                    (void)tweet_id;
                    sum += sc.dimension(dim);
                }
                row[std::string("judge_") + std::string(dim)] = sum / n;
            }
        }
        methods_json.push_back(row);

        char buf[256];
        std::snprintf(buf, sizeof(buf), "%-16s n=%-5lld R_L=%s URL-R=%s #URL=%s Char=%s hallucinated=%lld",
                      tag.c_str(), static_cast<long long>(s.n_notes),
                      fmt(s.rouge_l_mean, 3).c_str(),
                      s.url_recall_mean ? fmt(*s.url_recall_mean, 3).c_str() : "n/a",
                      fmt(s.n_urls_mean, 3).c_str(), fmt(s.char_count_mean, 1).c_str(),
                      static_cast<long long>(flags[tag].hallucinated));
        lines.push_back(buf);
    }

    // human reference row: production statistics only
    if (!references.empty()) {
        double urls_sum = 0, chars_sum = 0;
        for (const auto& [tweet_id, ref] : references) {
            (void)tweet_id;
            urls_sum += static_cast<double>(extract_urls(ref.text, config.url_policy).size());
            chars_sum += static_cast<double>(char_count(ref.text));
        }
        const double n = static_cast<double>(references.size());
        methods_json.push_back(Json{{"method", "HUMAN"},
                                    {"n_notes", references.size()},
                                    {"n_urls_mean", urls_sum / n},
                                    {"char_count_mean", chars_sum / n}});
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%-16s n=%-5lld #URL=%s Char=%s (reference)", "HUMAN",
                      static_cast<long long>(references.size()), fmt(urls_sum / n, 3).c_str(),
                      fmt(chars_sum / n, 1).c_str());
        lines.push_back(buf);
    }

    Json report{{"_meta", meta_record(config, "report.json", now)["_meta"]},
                {"methods", methods_json}};

    // deltas (when judge scores exist for at least two methods)
    const auto deltas_path = config.run_dir / artifacts::kDeltasCsv;
    write_deltas_csv(deltas_path, judge_scores);

    // win rates (when human rankings are configured)
    if (!config.rankings_csv.empty() && std::filesystem::exists(config.rankings_csv)) {
        const RankingsData rankings = load_rankings_csv(config.rankings_csv);
        const WinRateMatrix matrix = win_rate_matrix(rankings.rankings);

        std::ofstream win_out(config.run_dir / artifacts::kWinratesCsv, std::ios::trunc);
        win_out << "row_method,col_method,win_rate,n_comparisons\n";
        Json win_json = Json::array();
        for (std::size_t i = 0; i < matrix.methods.size(); ++i) {
            for (std::size_t j = 0; j < matrix.methods.size(); ++j) {
                if (i == j) continue;
                const std::string row_tag(to_string(matrix.methods[i]));
                const std::string col_tag(to_string(matrix.methods[j]));
                win_out << row_tag << ',' << col_tag << ','
                        << (matrix.cells[i][j] ? fmt(*matrix.cells[i][j], 4) : std::string{}) << ','
                        << matrix.n_comparisons[i][j] << '\n';
                if (matrix.cells[i][j]) {
                    win_json.push_back(Json{{"row", row_tag},
                                            {"col", col_tag},
                                            {"win_rate", *matrix.cells[i][j]},
                                            {"n", matrix.n_comparisons[i][j]}});
                }
            }
        }
        report["win_rates"] = std::move(win_json);

        Json answers = Json::object();
        for (const auto& [method_tag, columns] : rankings.answers) {
            Json per_method = Json::object();
            for (const auto& [criterion, sum_count] : columns) {
                per_method[criterion] = sum_count.first / static_cast<double>(sum_count.second);
            }
            answers[method_tag] = std::move(per_method);
        }
        report["human_eval"] = std::move(answers);
    }

    std::ofstream json_out(config.run_dir / artifacts::kReportJson, std::ios::trunc);
    json_out << report.dump(2) << '\n';

    std::ofstream txt_out(config.run_dir / artifacts::kReportTxt, std::ios::trunc);
    txt_out << "run report (config " << config.config_digest.substr(0, 12) << ", version "
            << kVersion << ")\n";
    txt_out << "bert_score: not computed (no external scorer configured)\n\n";
    for (const std::string& line : lines) txt_out << line << '\n';

    outcome.items_done = static_cast<std::int64_t>(notes.size());
    return outcome;
}

} // namespace gitsearch
