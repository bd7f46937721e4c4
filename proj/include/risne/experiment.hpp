// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "risne/config.hpp"
#include "risne/results.hpp"
#include "risne/trace.hpp"

namespace risne {

/// Seed namespaces under the master seed. Training and evaluation episodes
/// come from disjoint namespaces, so evaluation never replays a training
/// episode:
///   init population     derive(master, {kSeedInit, run})
///   training episodes   derive(derive(master, {kSeedTrain, run}), {generation, e})
///   evaluation episodes derive(master, {kSeedEval, run, e})
inline constexpr std::uint64_t kSeedInit = 1;
inline constexpr std::uint64_t kSeedTrain = 2;
inline constexpr std::uint64_t kSeedEval = 3;

bool is_evolved(const std::string& policy);

/// Builds the policy for cfg.policy. Multi-surface scenarios wrap the mbacnn
/// and ff agents in a MultiRisPolicy; ff_cent is one centralized network.
std::shared_ptr<const Policy> make_policy(const ExperimentConfig& cfg);

/// Stochastic source for the scenario, or replay of a recorded trace.
std::shared_ptr<const ChannelSource> make_source(const ExperimentConfig& cfg, const ChannelTrace* trace = nullptr);

EvaluationContext make_context(const ExperimentConfig& cfg, const ChannelSource& source, SelectMode mode);

std::vector<std::uint64_t> evaluation_seeds(std::uint64_t master, std::size_t run, std::size_t episodes);

struct EvalStats {
    double mean_snr = 0.0;
    double mean_rate = 0.0;
    double rate_std_error = 0.0;
    std::vector<double> episode_snr;  ///< per-episode mean gamma
    std::vector<double> episode_rate; ///< per-episode mean rate
};

/// Episodes run in parallel; the result does not depend on the thread count.
EvalStats evaluate_policy(const Policy& policy, std::span<const double> genome, const EvaluationContext& ctx,
                          std::span<const std::uint64_t> episode_seeds);

struct RunOutput {
    MetricRecord metrics;
    std::vector<HistoryRecord> history; ///< empty for non-evolved policies
    std::vector<double> genome;
};

struct RunOptions {
    std::optional<std::filesystem::path> out_dir; ///< artifacts are written only when set
    ResultFormat format = ResultFormat::csv;
    std::ostream* log = nullptr;
    const ChannelTrace* trace = nullptr;          ///< replace the stochastic channels
    const std::vector<double>* genome = nullptr;  ///< skip training and evaluate this genome
};

/// One training (if the policy is evolved) plus evaluation pass per
/// runs_per_point, returning one MetricRecord per run.
std::vector<RunOutput> run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

/// Returns a copy of cfg with one field replaced. `name` is either
/// "section.field" or a bare field name, looked up in the order experiment,
/// scenario, evolution, arch, ff, lga, aggregator, perturbation. The value is
/// parsed as JSON, falling back to a plain string.
ExperimentConfig with_parameter(const ExperimentConfig& cfg, const std::string& name, const std::string& value);

/// One run per (value, policy) pair, all with the same master seed. Writes a
/// combined metrics file, a plot companion CSV and a manifest when out_dir is
/// set.
std::vector<MetricRecord> sweep(const ExperimentConfig& cfg, const std::string& param,
                                const std::vector<std::string>& values, const std::vector<std::string>& policies,
                                const RunOptions& options = {});

} // namespace risne
