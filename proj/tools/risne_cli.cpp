// SPDX-License-Identifier: Apache-2.0
// Command-line front end: train / eval / sweep / oracle / import-trace / export-trace.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "risne/experiment.hpp"
#include "risne/genome_io.hpp"
#include "risne/parallel.hpp"

namespace {

struct CommonArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string policy;
    std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_policy = true)
{
    cmd->add_option("--config", args.config, "experiment config (JSON)")->check(CLI::ExistingFile);
    cmd->add_option("--seed", args.seed, "master seed (overrides the config)");
    cmd->add_option("--out", args.out, "output directory (overrides the config)");
    if (with_policy) {
        cmd->add_option("--policy", args.policy, "mbacnn, ff, ff_cent, lga, random or oracle");
    }
    cmd->add_option("--format", args.format, "metrics format")->check(CLI::IsMember({"csv", "json"}));
}

risne::ExperimentConfig load(const CommonArgs& args)
{
    risne::ExperimentConfig cfg = args.config.empty() ? risne::ExperimentConfig{} : risne::load_config(args.config);
    if (args.seed) {
        cfg.seed = *args.seed;
    }
    if (!args.out.empty()) {
        cfg.output_dir = args.out;
    }
    if (!args.policy.empty()) {
        cfg.policy = args.policy;
    }
    cfg.resolve();
    cfg.validate();
    return cfg;
}

std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

void print_records(const std::vector<risne::MetricRecord>& records)
{
    for (const auto& r : records) {
        std::cout << r.run_id << "  " << r.policy;
        if (!r.param.empty()) {
            std::cout << "  " << r.param << "=" << r.param_value;
        }
        std::cout << "  snr " << risne::format_double(r.mean_snr_db) << " dB  rate "
                  << risne::format_double(r.mean_rate) << " b/s/Hz\n";
    }
}

std::vector<risne::MetricRecord> metrics_of(const std::vector<risne::RunOutput>& outputs)
{
    std::vector<risne::MetricRecord> records;
    for (const auto& o : outputs) {
        records.push_back(o.metrics);
    }
    return records;
}

// Runs with a log file in the output directory and returns the metrics.
std::vector<risne::MetricRecord> run_logged(const risne::ExperimentConfig& cfg, risne::RunOptions opt)
{
    const std::filesystem::path dir = cfg.output_dir;
    std::filesystem::create_directories(dir);
    std::ofstream log(dir / "run.log");
    opt.out_dir = dir;
    opt.log = &log;
    log << "threads: " << risne::worker_threads() << '\n';
    return metrics_of(risne::run_experiment(cfg, opt));
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Neuroevolution of RIS phase and precoder policies"};
    app.require_subcommand(1);

    CommonArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "evolve a policy and evaluate it");
    add_common(train_cmd, train_args);

    CommonArgs eval_args;
    std::string eval_genome;
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a saved genome or a baseline policy");
    add_common(eval_cmd, eval_args);
    eval_cmd->add_option("--genome", eval_genome, "genome file from a training run")->check(CLI::ExistingFile);

    CommonArgs sweep_args;
    std::string sweep_param;
    std::string sweep_values;
    auto* sweep_cmd = app.add_subcommand("sweep", "one run per parameter value (and per policy)");
    add_common(sweep_cmd, sweep_args);
    sweep_cmd->add_option("--param", sweep_param, "parameter name, e.g. tx_power_dbm or evolution.p_mut")
        ->required();
    sweep_cmd->add_option("--values", sweep_values, "comma-separated values")->required();

    CommonArgs oracle_args;
    auto* oracle_cmd = app.add_subcommand("oracle", "evaluate the exhaustive-search upper bound");
    add_common(oracle_cmd, oracle_args, false);

    CommonArgs import_args;
    std::string import_trace;
    std::string import_genome;
    auto* import_cmd = app.add_subcommand("import-trace", "validate a channel trace and evaluate a policy on it");
    add_common(import_cmd, import_args);
    import_cmd->add_option("--trace", import_trace, "trace file")->required()->check(CLI::ExistingFile);
    import_cmd->add_option("--genome", import_genome, "genome file for evolved policies")->check(CLI::ExistingFile);

    CommonArgs export_args;
    std::string export_trace;
    std::size_t export_episodes = 1;
    auto* export_cmd = app.add_subcommand("export-trace", "sample channels from the scenario into a trace file");
    add_common(export_cmd, export_args, false);
    export_cmd->add_option("--trace", export_trace, "output trace file")->required();
    export_cmd->add_option("--episodes", export_episodes, "episodes of `horizon` steps each");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train_cmd) {
            const auto cfg = load(train_args);
            risne::RunOptions opt;
            opt.format = risne::result_format_from_string(train_args.format);
            print_records(run_logged(cfg, opt));
        } else if (*eval_cmd) {
            const auto cfg = load(eval_args);
            risne::RunOptions opt;
            opt.format = risne::result_format_from_string(eval_args.format);
            std::vector<double> genome;
            if (risne::is_evolved(cfg.policy)) {
                if (eval_genome.empty()) {
                    throw risne::InputError("eval: policy '" + cfg.policy + "' needs --genome");
                }
                genome = risne::load_genome(eval_genome, risne::make_policy(cfg)->layout());
                opt.genome = &genome;
            }
            print_records(run_logged(cfg, opt));
        } else if (*sweep_cmd) {
            // --policy may list several kinds; each is validated by sweep().
            CommonArgs base = sweep_args;
            base.policy.clear();
            const auto cfg = load(base);
            risne::RunOptions opt;
            opt.format = risne::result_format_from_string(sweep_args.format);
            opt.out_dir = cfg.output_dir;
            const auto records = risne::sweep(cfg, sweep_param, split_list(sweep_values),
                                              split_list(sweep_args.policy), opt);
            print_records(records);
        } else if (*oracle_cmd) {
            auto cfg = load(oracle_args);
            cfg.policy = "oracle";
            risne::RunOptions opt;
            opt.format = risne::result_format_from_string(oracle_args.format);
            print_records(run_logged(cfg, opt));
        } else if (*import_cmd) {
            const auto cfg = load(import_args);
            const auto trace = risne::import_channel_trace(import_trace);
            risne::validate_trace(trace, cfg.scenario);
            std::cout << "trace: " << trace.records.size() << " records, " << trace.episodes().size()
                      << " episodes, n_tx " << trace.n_tx << ", n_ris " << trace.n_ris << ", ris_count "
                      << trace.ris_count << '\n';
            risne::RunOptions opt;
            opt.format = risne::result_format_from_string(import_args.format);
            opt.trace = &trace;
            std::vector<double> genome;
            if (risne::is_evolved(cfg.policy) && !import_genome.empty()) {
                genome = risne::load_genome(import_genome, risne::make_policy(cfg)->layout());
                opt.genome = &genome;
            }
            print_records(run_logged(cfg, opt));
        } else if (*export_cmd) {
            const auto cfg = load(export_args);
            const auto trace = risne::sample_trace(cfg.scenario, export_episodes, cfg.seed);
            risne::write_channel_trace(trace, export_trace);
            std::cout << "wrote " << trace.records.size() << " records to " << export_trace << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
