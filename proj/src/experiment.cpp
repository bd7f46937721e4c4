// SPDX-License-Identifier: Apache-2.0
#include "risne/experiment.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "risne/genome_io.hpp"
#include "risne/parallel.hpp"

namespace risne {

using nlohmann::json;

bool is_evolved(const std::string& policy)
{
    return policy == "mbacnn" || policy == "ff" || policy == "ff_cent";
}

std::shared_ptr<const Policy> make_policy(const ExperimentConfig& cfg)
{
    const Codebook codebook = dft_codebook(cfg.scenario.n_tx);
    const LinkBudget budget = LinkBudget::from_scenario(cfg.scenario);
    const std::size_t k = cfg.scenario.ris_count();
    if (cfg.policy == "random") {
        return std::make_shared<RandomPolicy>(codebook);
    }
    if (cfg.policy == "lga") {
        return std::make_shared<LgaPolicy>(codebook, budget, cfg.lga);
    }
    if (cfg.policy == "oracle") {
        return std::make_shared<OraclePolicy>(codebook, budget, cfg.oracle_cap);
    }
    if (cfg.policy == "ff_cent") {
        return std::make_shared<FeedForwardPolicy>(cfg.ff);
    }
    std::shared_ptr<const RisAgentPolicy> agent;
    if (cfg.policy == "mbacnn") {
        agent = std::make_shared<Mbacnn>(cfg.arch);
    } else if (cfg.policy == "ff") {
        agent = std::make_shared<FeedForwardPolicy>(cfg.ff);
    } else {
        throw ConfigError("experiment.policy: unknown policy '" + cfg.policy + "'");
    }
    if (k == 1) {
        return agent;
    }
    return std::make_shared<MultiRisPolicy>(agent, cfg.aggregator, k, codebook.size());
}

std::shared_ptr<const ChannelSource> make_source(const ExperimentConfig& cfg, const ChannelTrace* trace)
{
    if (trace != nullptr) {
        validate_trace(*trace, cfg.scenario);
        return std::make_shared<ReplayChannelSource>(trace->channel_sets());
    }
    return std::make_shared<StochasticChannelSource>(cfg.scenario);
}

EvaluationContext make_context(const ExperimentConfig& cfg, const ChannelSource& source, SelectMode mode)
{
    return {&source, dft_codebook(cfg.scenario.n_tx), LinkBudget::from_scenario(cfg.scenario), cfg.scenario.horizon,
            mode};
}

std::vector<std::uint64_t> evaluation_seeds(std::uint64_t master, std::size_t run, std::size_t episodes)
{
    std::vector<std::uint64_t> seeds(episodes);
    for (std::size_t e = 0; e < episodes; ++e) {
        seeds[e] = derive_seed(master, {kSeedEval, run, e});
    }
    return seeds;
}

EvalStats evaluate_policy(const Policy& policy, std::span<const double> genome, const EvaluationContext& ctx,
                          std::span<const std::uint64_t> episode_seeds)
{
    const std::size_t n = episode_seeds.size();
    if (n == 0) {
        throw InputError("evaluate_policy: no episodes");
    }
    EvalStats stats;
    stats.episode_snr.assign(n, 0.0);
    stats.episode_rate.assign(n, 0.0);
    parallel_for(n, [&](std::size_t e) {
        double rate_sum = 0.0;
        const StepObserver observe = [&](std::size_t, std::size_t, double gamma) { rate_sum += rate(gamma); };
        stats.episode_snr[e] = evaluate_fitness(policy, genome, ctx, episode_seeds.subspan(e, 1), observe);
        stats.episode_rate[e] = rate_sum / static_cast<double>(ctx.horizon);
    });
    const double dn = static_cast<double>(n);
    stats.mean_snr = std::accumulate(stats.episode_snr.begin(), stats.episode_snr.end(), 0.0) / dn;
    stats.mean_rate = std::accumulate(stats.episode_rate.begin(), stats.episode_rate.end(), 0.0) / dn;
    if (n > 1) {
        double ss = 0.0;
        for (double r : stats.episode_rate) {
            ss += (r - stats.mean_rate) * (r - stats.mean_rate);
        }
        stats.rate_std_error = std::sqrt(ss / (dn - 1.0) / dn);
    }
    return stats;
}

namespace {

// Candidate evaluations a search baseline performs per coherence block.
std::size_t search_cost(const ExperimentConfig& cfg)
{
    const std::size_t v = cfg.scenario.n_tx;
    if (cfg.policy == "lga") {
        const auto& l = cfg.lga;
        return v * (l.individuals + l.generations * (l.individuals - l.elitism));
    }
    if (cfg.policy == "oracle") {
        const std::size_t n = cfg.scenario.ris_count() * cfg.scenario.n_ris;
        return n < 63 ? v * (std::size_t{1} << n) : 0;
    }
    return 0;
}

std::vector<OverheadRecord> overhead_records(const ExperimentConfig& cfg, std::size_t genome_size)
{
    const OverheadInputs in{cfg.scenario.ris_count(), cfg.scenario.n_tx, cfg.scenario.n_ris, cfg.scenario.n_tx,
                            genome_size};
    return {message_accounting(in, ProtocolPhase::training, ControlMode::distributed),
            message_accounting(in, ProtocolPhase::deployment, ControlMode::distributed),
            message_accounting(in, ProtocolPhase::deployment, ControlMode::centralized)};
}

} // namespace

std::vector<RunOutput> run_experiment(const ExperimentConfig& cfg_in, const RunOptions& options)
{
    ExperimentConfig cfg = cfg_in;
    cfg.resolve();
    cfg.validate();

    std::ostream* log = options.log;
    if (options.out_dir) {
        std::filesystem::create_directories(*options.out_dir);
        save_config(cfg, *options.out_dir / "config.json");
    }
    if (log) {
        *log << "config: " << config_to_json(cfg).dump() << '\n';
    }

    const auto policy = make_policy(cfg);
    const auto base_source = make_source(cfg, options.trace);
    std::shared_ptr<const ChannelSource> eval_source = base_source;
    if (cfg.perturbation.epsilon > 0.0) {
        eval_source =
            std::make_shared<PerturbedChannelSource>(base_source, cfg.perturbation.epsilon, cfg.perturbation.alpha);
    }
    const bool evolved = is_evolved(cfg.policy);
    const std::size_t m = policy->layout().total();
    if (options.genome && options.genome->size() != m) {
        throw InputError("supplied genome has " + std::to_string(options.genome->size()) + " weights, policy '" +
                         cfg.policy + "' expects " + std::to_string(m));
    }

    std::vector<RunOutput> outputs;
    std::vector<HistoryRecord> all_history;
    using clock = std::chrono::steady_clock;
    for (std::size_t run = 0; run < cfg.runs_per_point; ++run) {
        const auto start = clock::now();
        RunOutput out;
        out.metrics.run_id = "run" + std::to_string(run);
        out.metrics.policy = policy->kind();

        if (evolved && options.genome) {
            out.genome = *options.genome;
        } else if (evolved) {
            const EvaluationContext train_ctx = make_context(cfg, *base_source, cfg.train_mode);
            Rng init_rng(derive_seed(cfg.seed, {kSeedInit, run}));
            const std::uint64_t train_seed = derive_seed(cfg.seed, {kSeedTrain, run});
            const auto on_gen = [&](const HistoryRecord& rec, std::span<const double>) {
                if (log) {
                    *log << out.metrics.run_id << " generation " << rec.generation << " best "
                         << format_double(rec.best_fitness) << " mean " << format_double(rec.mean_fitness)
                         << " wall " << format_double(rec.wall_time_s) << "s\n";
                }
            };
            TrainResult tr =
                train(m, episode_fitness(*policy, train_ctx, train_seed, cfg.evo), cfg.evo, init_rng, on_gen);
            out.genome = std::move(tr.best_genome);
            out.history = std::move(tr.history);
            out.metrics.evaluations = cfg.evo.l_pop * (cfg.evo.generations + 1);
        }

        const EvaluationContext eval_ctx = make_context(cfg, *eval_source, cfg.eval_mode);
        const auto seeds = evaluation_seeds(cfg.seed, run, cfg.eval_episodes);
        const EvalStats stats = evaluate_policy(*policy, out.genome, eval_ctx, seeds);
        out.metrics.mean_snr = stats.mean_snr;
        out.metrics.mean_snr_db = to_db(stats.mean_snr);
        out.metrics.mean_rate = stats.mean_rate;
        out.metrics.rate_std_error = stats.rate_std_error;
        out.metrics.episodes = cfg.eval_episodes;
        if (!evolved) {
            out.metrics.evaluations = search_cost(cfg) * cfg.eval_episodes * cfg.scenario.horizon;
        }
        out.metrics.wall_time_s = std::chrono::duration<double>(clock::now() - start).count();
        if (log) {
            *log << out.metrics.run_id << " " << out.metrics.policy << " mean_snr_db "
                 << format_double(out.metrics.mean_snr_db) << " mean_rate " << format_double(out.metrics.mean_rate)
                 << " wall " << format_double(out.metrics.wall_time_s) << "s\n";
        }

        if (options.out_dir && evolved) {
            write_text(*options.out_dir / ("history_" + out.metrics.run_id + ".csv"), history_csv(out.history));
            save_genome(*options.out_dir / ("best_genome_" + out.metrics.run_id + ".bin"), policy->layout(),
                        out.genome);
        }
        all_history.insert(all_history.end(), out.history.begin(), out.history.end());
        outputs.push_back(std::move(out));
    }

    if (options.out_dir) {
        std::vector<MetricRecord> records;
        for (const auto& o : outputs) {
            records.push_back(o.metrics);
        }
        export_results(records, options.format, *options.out_dir);
        write_text(*options.out_dir / "timing.csv", timing_csv(all_history, records));
        if (cfg.scenario.ris_count() > 1) {
            write_text(*options.out_dir / "overhead.csv", overhead_csv(overhead_records(cfg, m)));
        }
    }
    return outputs;
}

ExperimentConfig with_parameter(const ExperimentConfig& cfg, const std::string& name, const std::string& value)
{
    static const char* kSections[] = {"experiment", "scenario", "evolution", "arch",
                                      "ff",         "lga",      "aggregator", "perturbation"};
    json j = config_to_json(cfg);
    std::string section;
    std::string key = name;
    if (const auto dot = name.find('.'); dot != std::string::npos) {
        section = name.substr(0, dot);
        key = name.substr(dot + 1);
        if (!j.contains(section) || !j[section].contains(key)) {
            throw InputError("unknown parameter '" + name + "'");
        }
    } else {
        for (const char* s : kSections) {
            if (j[s].contains(key)) {
                section = s;
                break;
            }
        }
        if (section.empty()) {
            throw InputError("unknown parameter '" + name + "'");
        }
    }
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::parse_error&) {
        parsed = value;
    }
    j[section][key] = parsed;
    return config_from_json(j);
}

std::vector<MetricRecord> sweep(const ExperimentConfig& cfg, const std::string& param,
                                const std::vector<std::string>& values, const std::vector<std::string>& policies_in,
                                const RunOptions& options)
{
    std::vector<std::string> policies = policies_in.empty() ? std::vector<std::string>{cfg.policy} : policies_in;
    // Resolve every point up front so a bad value fails before any training.
    std::vector<ExperimentConfig> points;
    for (const auto& v : values) {
        for (const auto& p : policies) {
            ExperimentConfig c = with_parameter(cfg, param, v);
            c.policy = p;
            c.resolve();
            c.validate();
            points.push_back(std::move(c));
        }
    }

    std::vector<MetricRecord> records;
    std::size_t idx = 0;
    for (const auto& v : values) {
        for (const auto& p : policies) {
            RunOptions opt = options;
            if (options.out_dir) {
                opt.out_dir = *options.out_dir / (param + "=" + v) / p;
            }
            for (auto& out : run_experiment(points[idx++], opt)) {
                out.metrics.param = param;
                out.metrics.param_value = v;
                records.push_back(std::move(out.metrics));
            }
        }
    }

    if (options.out_dir && !records.empty()) {
        export_results(records, options.format, *options.out_dir);
        write_text(*options.out_dir / ("plot_" + param + ".csv"), plot_csv(records));
        json manifest{{"param", param},
                      {"values", values},
                      {"policies", policies},
                      {"seed", cfg.seed},
                      {"runs_per_point", cfg.runs_per_point},
                      {"seed_policy", "every point reuses the master seed, so training and evaluation episodes are "
                                      "common across values and policies"}};
        write_text(*options.out_dir / "sweep_manifest.json", manifest.dump(2) + "\n");
    }
    return records;
}

} // namespace risne
