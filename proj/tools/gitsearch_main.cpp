#include <iostream>

#include <CLI11.hpp>

#include "gitsearch/commands.hpp"
#include "gitsearch/errors.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::string run_dir;
    std::string mode;
    int concurrency = 0;
    std::string ids_file;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "run configuration file")->required();
    cmd->add_option("--run-dir", opts.run_dir, "override run directory");
    cmd->add_option("--concurrency", opts.concurrency, "max in-flight tweets");
    cmd->add_option("--ids", opts.ids_file, "file with one tweet_id per line");
    cmd->add_flag_callback("--record", [&opts] { opts.mode = "record"; },
                           "record provider calls to the run tape");
    cmd->add_flag_callback("--replay", [&opts] { opts.mode = "replay"; },
                           "serve provider calls from the run tape only");
    cmd->add_flag_callback("--offline", [&opts] { opts.mode = "offline"; },
                           "fail any provider call");
}

gitsearch::RunConfig resolve_config(const CommonOptions& opts) {
    gitsearch::RunConfig config = gitsearch::load_config(opts.config_path);
    if (!opts.run_dir.empty()) config.run_dir = opts.run_dir;
    if (!opts.mode.empty()) config.mode = *gitsearch::parse_gateway_mode(opts.mode);
    if (opts.concurrency > 0) config.concurrency = opts.concurrency;
    config.validate();
    return config;
}

std::vector<std::string> resolve_ids(const CommonOptions& opts) {
    std::vector<std::string> ids;
    if (opts.ids_file.empty()) return ids;
    std::ifstream in(opts.ids_file);
    if (!in) throw gitsearch::ConfigInvalid("cannot open ids file " + opts.ids_file);
    std::string line;
    while (std::getline(in, line)) {
        const std::string id = gitsearch::trim(line);
        if (!id.empty() && id[0] != '#') ids.push_back(id);
    }
    return ids;
}

int report_outcome(const gitsearch::CommandOutcome& outcome, const std::string& what) {
    std::cout << what << ": done=" << outcome.items_done << " skipped=" << outcome.items_skipped
              << " soft_failures=" << outcome.soft_failures << '\n';
    return outcome.exit_code();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gap-informed community note generation and evaluation"};
    app.require_subcommand(1);

    CommonOptions curate_opts, split_opts, pipeline_opts, baseline_opts, metrics_opts, judge_opts,
        report_opts;
    std::string baseline_method;
    std::string metrics_notes, judge_notes;

    add_common(app.add_subcommand("curate", "build the corpus from note dumps"), curate_opts);
    add_common(app.add_subcommand("split", "write the temporal test split"), split_opts);
    add_common(app.add_subcommand("pipeline", "run gap detection, search, and synthesis"),
               pipeline_opts);
    auto* baseline_cmd = app.add_subcommand("baseline", "run a baseline generator");
    add_common(baseline_cmd, baseline_opts);
    baseline_cmd->add_option("--method", baseline_method, "supernotes-lite | web-agent")
        ->required();
    auto* metrics_cmd = app.add_subcommand("metrics", "score notes against references");
    add_common(metrics_cmd, metrics_opts);
    metrics_cmd->add_option("--notes", metrics_notes, "notes file (default run_dir/notes.jsonl)");
    auto* judge_cmd = app.add_subcommand("judge", "run the five-dimension rubric");
    add_common(judge_cmd, judge_opts);
    judge_cmd->add_option("--notes", judge_notes, "notes file (default run_dir/notes.jsonl)");
    add_common(app.add_subcommand("report", "write the consolidated run report"), report_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("curate")) {
            return report_outcome(gitsearch::cmd_curate(resolve_config(curate_opts)), "curate");
        }
        if (app.got_subcommand("split")) {
            return report_outcome(gitsearch::cmd_split(resolve_config(split_opts)), "split");
        }
        if (app.got_subcommand("pipeline")) {
            return report_outcome(gitsearch::cmd_pipeline(resolve_config(pipeline_opts),
                                                          resolve_ids(pipeline_opts)),
                                  "pipeline");
        }
        if (app.got_subcommand("baseline")) {
            return report_outcome(gitsearch::cmd_baseline(resolve_config(baseline_opts),
                                                          baseline_method,
                                                          resolve_ids(baseline_opts)),
                                  "baseline");
        }
        if (app.got_subcommand("metrics")) {
            return report_outcome(
                gitsearch::cmd_metrics(resolve_config(metrics_opts), metrics_notes), "metrics");
        }
        if (app.got_subcommand("judge")) {
            return report_outcome(gitsearch::cmd_judge(resolve_config(judge_opts), judge_notes),
                                  "judge");
        }
        if (app.got_subcommand("report")) {
            return report_outcome(gitsearch::cmd_report(resolve_config(report_opts)), "report");
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
