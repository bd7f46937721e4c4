// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "risne/channel.hpp"
#include "risne/numerics.hpp"
#include "risne/policy.hpp"
#include "risne/rng.hpp"
#include "risne/system.hpp"

namespace risne {

/// CoSyNE hyper-parameters. t_e_train and init_sigma are local choices; the
/// rest are the usual settings for this problem size.
struct EvoParams {
    std::size_t l_pop = 100;
    double p_mut = 0.3;
    double sigma_mut = 0.2;
    std::size_t generations = 25;
    std::size_t t_e_train = 2;
    bool permutation_enabled = true;
    double init_sigma = 0.5;
    /// Draw fresh training episodes every generation. When false every
    /// generation is scored on the same episode set.
    bool refresh_episode_seeds = true;

    void validate() const;

    bool operator==(const EvoParams&) const = default;
};

/// Rows are individuals, columns are subpopulations of one weight each.
struct Population {
    RealMatrix weights;
    std::vector<double> fitness;
    std::size_t generation = 0;

    std::size_t size() const { return weights.rows(); }
    std::size_t genome_length() const { return weights.cols(); }
    std::span<const double> individual(std::size_t i) const { return weights.row(i); }
};

Population init_population(const EvoParams& params, std::size_t m, Rng& rng);

// --- fitness -----------------------------------------------------------------

/// Everything needed to roll a policy out except the genome and the seeds.
struct EvaluationContext {
    const ChannelSource* source = nullptr;
    Codebook codebook;
    LinkBudget budget;
    std::size_t horizon = 1;
    SelectMode mode = SelectMode::sample;
};

/// Per-episode random streams. Channel draws and policy sampling use separate
/// streams so a policy consuming more or fewer draws never shifts the channels.
struct EpisodeStreams {
    Rng channels;
    Rng policy;

    explicit EpisodeStreams(std::uint64_t episode_seed);
};

using StepObserver = std::function<void(std::size_t episode, std::size_t step, double gamma)>;

/// Mean instantaneous SNR over len(episode_seeds) episodes of `horizon` steps,
/// with a fresh channel draw per step.
double evaluate_fitness(const Policy& policy, std::span<const double> genome, const EvaluationContext& ctx,
                        std::span<const std::uint64_t> episode_seeds, const StepObserver& on_step = {});

// --- variation operators -------------------------------------------------------

/// Uniform crossover: every gene from p1 or p2 with probability 1/2.
std::vector<double> crossover(std::span<const double> p1, std::span<const double> p2, Rng& rng);

/// Same, with the coin flips supplied (true -> take from p1).
std::vector<double> crossover_masked(std::span<const double> p1, std::span<const double> p2,
                                     const std::vector<bool>& take_first);

/// Each gene gets N(0, sigma^2) noise with probability p_mut.
void mutate(std::span<double> genome, double p_mut, double sigma_mut, Rng& rng);

/// 1 - (f / f_max)^(1/M) per individual, evaluated as -expm1(log(f/f_max)/M).
/// All zeros when f_max == 0.
std::vector<double> permutation_probabilities(std::span<const double> fitness, double f_max, std::size_t m);

/// Marks each weight with its row's probability and shuffles the marked
/// entries within every column.
void permute_marked(RealMatrix& weights, std::span<const double> row_probabilities, Rng& rng);

// --- generation loop -----------------------------------------------------------

/// Fitness of one individual. Must be a pure function of the genome for the
/// duration of one generation; it is called concurrently.
using FitnessFn = std::function<double(std::span<const double> genome, std::size_t individual)>;

/// Evaluates every row (in parallel) and sorts rows by fitness, descending.
void evaluate_population(Population& pop, const FitnessFn& fitness);

struct GenerationSummary {
    std::size_t generation = 0;
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
    std::vector<double> best_genome;
};

/// Parent / offspring split for a population of size l.
std::size_t parent_count(std::size_t l_pop);
std::size_t offspring_count(std::size_t l_pop);

/// One CoSyNE generation: evaluate, sort, replace the bottom rows by mutated
/// crossover offspring of the top quarter, then permute marked weights.
GenerationSummary evolve_generation(Population& pop, const FitnessFn& fitness, const EvoParams& params, Rng& rng);

struct HistoryRecord {
    std::size_t generation = 0;
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
    double wall_time_s = 0.0;
};

struct TrainResult {
    std::vector<double> best_genome;
    double best_fitness = 0.0;
    std::vector<HistoryRecord> history;
};

/// Builds the fitness function used in a given generation.
using FitnessFactory = std::function<FitnessFn(std::size_t generation)>;
using GenerationCallback = std::function<void(const HistoryRecord&, std::span<const double> generation_best)>;

/// Runs `generations` CoSyNE steps and scores the final population, so the
/// history has generations + 1 entries. Returns the best genome seen in any
/// evaluation.
TrainResult train(std::size_t genome_length, const FitnessFactory& factory, const EvoParams& params, Rng& rng,
                  const GenerationCallback& on_generation = {});

/// Episode seeds for training generation g. With refresh disabled every
/// generation gets the generation-0 set.
std::vector<std::uint64_t> training_episode_seeds(std::uint64_t train_seed, std::size_t generation,
                                                  std::size_t episodes, bool refresh);

/// Common-random-number fitness: within a generation every individual sees the
/// same episode seeds.
FitnessFactory episode_fitness(const Policy& policy, const EvaluationContext& ctx, std::uint64_t train_seed,
                               const EvoParams& params);

} // namespace risne
