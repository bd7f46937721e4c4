// SPDX-License-Identifier: Apache-2.0
#include "risne/cosyne.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "risne/parallel.hpp"

namespace risne {

void EvoParams::validate() const
{
    auto fail = [](const std::string& field, const std::string& why) {
        throw ConfigError("evolution." + field + ": " + why);
    };
    if (l_pop < 4) {
        fail("l_pop", "must be at least 4 so the parent quartile is non-empty, got " + std::to_string(l_pop));
    }
    if (!(p_mut >= 0.0 && p_mut <= 1.0)) {
        fail("p_mut", "must lie in [0, 1], got " + std::to_string(p_mut));
    }
    if (!(sigma_mut >= 0.0) || !std::isfinite(sigma_mut)) {
        fail("sigma_mut", "must be non-negative");
    }
    if (!(init_sigma >= 0.0) || !std::isfinite(init_sigma)) {
        fail("init_sigma", "must be non-negative");
    }
    if (t_e_train < 1) {
        fail("t_e_train", "must be at least 1");
    }
}

Population init_population(const EvoParams& params, std::size_t m, Rng& rng)
{
    if (m < 1) {
        throw InputError("init_population: genome length must be at least 1");
    }
    Population pop;
    pop.weights = RealMatrix(params.l_pop, m);
    for (double& w : pop.weights.data()) {
        w = params.init_sigma * rng.normal();
    }
    return pop;
}

EpisodeStreams::EpisodeStreams(std::uint64_t episode_seed)
    : channels(derive_seed(episode_seed, {0})), policy(derive_seed(episode_seed, {1}))
{
}

double evaluate_fitness(const Policy& policy, std::span<const double> genome, const EvaluationContext& ctx,
                        std::span<const std::uint64_t> episode_seeds, const StepObserver& on_step)
{
    if (ctx.source == nullptr) {
        throw InputError("evaluate_fitness: no channel source");
    }
    if (ctx.horizon < 1 || episode_seeds.empty()) {
        throw InputError("evaluate_fitness: horizon and episode count must be at least 1");
    }
    double total = 0.0;
    for (std::size_t e = 0; e < episode_seeds.size(); ++e) {
        EpisodeStreams streams(episode_seeds[e]);
        for (std::size_t t = 0; t < ctx.horizon; ++t) {
            const ChannelSet cs = ctx.source->draw(streams.channels);
            const PolicyOutput out = policy.act(genome, cs, streams.policy, ctx.mode);
            const double gamma = snr(cs, out.phases, ctx.codebook.vector(out.precoder_index), ctx.budget);
            if (on_step) {
                on_step(e, t, gamma);
            }
            total += gamma;
        }
    }
    return total / static_cast<double>(episode_seeds.size() * ctx.horizon);
}

std::vector<double> crossover_masked(std::span<const double> p1, std::span<const double> p2,
                                     const std::vector<bool>& take_first)
{
    if (p1.size() != p2.size() || take_first.size() != p1.size()) {
        throw InputError("crossover: parents and mask must have equal length");
    }
    std::vector<double> child(p1.size());
    for (std::size_t i = 0; i < child.size(); ++i) {
        child[i] = take_first[i] ? p1[i] : p2[i];
    }
    return child;
}

std::vector<double> crossover(std::span<const double> p1, std::span<const double> p2, Rng& rng)
{
    if (p1.size() != p2.size()) {
        throw InputError("crossover: parents differ in length (" + std::to_string(p1.size()) + " vs " +
                         std::to_string(p2.size()) + ")");
    }
    std::vector<bool> mask(p1.size());
    for (std::size_t i = 0; i < mask.size(); ++i) {
        mask[i] = rng.bernoulli(0.5);
    }
    return crossover_masked(p1, p2, mask);
}

void mutate(std::span<double> genome, double p_mut, double sigma_mut, Rng& rng)
{
    if (!(p_mut >= 0.0 && p_mut <= 1.0) || !(sigma_mut >= 0.0)) {
        throw InputError("mutate: p_mut must lie in [0, 1] and sigma_mut must be non-negative");
    }
    if (p_mut == 0.0) {
        return;
    }
    for (double& g : genome) {
        if (rng.bernoulli(p_mut)) {
            g += sigma_mut * rng.normal();
        }
    }
}

std::vector<double> permutation_probabilities(std::span<const double> fitness, double f_max, std::size_t m)
{
    if (m < 1) {
        throw InputError("permutation_probabilities: M must be at least 1");
    }
    std::vector<double> p(fitness.size(), 0.0);
    if (!(f_max > 0.0)) {
        return p;
    }
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t i = 0; i < fitness.size(); ++i) {
        if (fitness[i] < 0.0) {
            throw InputError("permutation_probabilities: fitness must be non-negative");
        }
        const double ratio = std::min(fitness[i] / f_max, 1.0);
        p[i] = ratio == 0.0 ? 1.0 : -std::expm1(std::log(ratio) * inv_m);
    }
    return p;
}

void permute_marked(RealMatrix& weights, std::span<const double> row_probabilities, Rng& rng)
{
    if (row_probabilities.size() != weights.rows()) {
        throw InputError("permute_marked: one probability per row is required");
    }
    std::vector<std::size_t> marked;
    std::vector<double> values;
    for (std::size_t col = 0; col < weights.cols(); ++col) {
        marked.clear();
        for (std::size_t row = 0; row < weights.rows(); ++row) {
            const double p = row_probabilities[row];
            if (p > 0.0 && rng.bernoulli(p)) {
                marked.push_back(row);
            }
        }
        if (marked.size() < 2) {
            continue;
        }
        values.clear();
        for (std::size_t row : marked) {
            values.push_back(weights(row, col));
        }
        rng.shuffle(std::span<double>(values));
        for (std::size_t i = 0; i < marked.size(); ++i) {
            weights(marked[i], col) = values[i];
        }
    }
}

void evaluate_population(Population& pop, const FitnessFn& fitness)
{
    const std::size_t l = pop.size();
    std::vector<double> scores(l);
    parallel_for(l, [&](std::size_t i) { scores[i] = fitness(pop.individual(i), i); });

    std::vector<std::size_t> order(l);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RealMatrix sorted(l, pop.genome_length());
    pop.fitness.assign(l, 0.0);
    for (std::size_t i = 0; i < l; ++i) {
        const auto src = pop.weights.row(order[i]);
        std::copy(src.begin(), src.end(), sorted.row(i).begin());
        pop.fitness[i] = scores[order[i]];
    }
    pop.weights = std::move(sorted);
}

std::size_t parent_count(std::size_t l_pop)
{
    return l_pop / 4;
}

std::size_t offspring_count(std::size_t l_pop)
{
    return (3 * l_pop + 3) / 4;
}

GenerationSummary evolve_generation(Population& pop, const FitnessFn& fitness, const EvoParams& params, Rng& rng)
{
    params.validate();
    if (pop.size() != params.l_pop) {
        throw InputError("evolve_generation: population has " + std::to_string(pop.size()) + " rows, expected " +
                         std::to_string(params.l_pop));
    }
    evaluate_population(pop, fitness);

    GenerationSummary summary;
    summary.generation = pop.generation;
    summary.best_fitness = pop.fitness.front();
    summary.mean_fitness =
        std::accumulate(pop.fitness.begin(), pop.fitness.end(), 0.0) / static_cast<double>(pop.size());
    summary.best_genome.assign(pop.individual(0).begin(), pop.individual(0).end());

    const std::size_t parents = parent_count(pop.size());
    for (std::size_t row = parents; row < pop.size(); ++row) {
        std::vector<double> child;
        if (parents >= 2) {
            const std::size_t a = rng.uniform_index(parents);
            std::size_t b = rng.uniform_index(parents - 1);
            if (b >= a) {
                ++b;
            }
            child = crossover(pop.individual(a), pop.individual(b), rng);
        } else {
            child.assign(pop.individual(0).begin(), pop.individual(0).end());
        }
        mutate(child, params.p_mut, params.sigma_mut, rng);
        std::copy(child.begin(), child.end(), pop.weights.row(row).begin());
    }

    if (params.permutation_enabled) {
        const auto p_perm = permutation_probabilities(pop.fitness, pop.fitness.front(), pop.genome_length());
        permute_marked(pop.weights, p_perm, rng);
    }
    ++pop.generation;
    return summary;
}

TrainResult train(std::size_t genome_length, const FitnessFactory& factory, const EvoParams& params, Rng& rng,
                  const GenerationCallback& on_generation)
{
    params.validate();
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

    TrainResult result;
    bool have_best = false;
    auto record = [&](std::size_t generation, double best, double mean, std::span<const double> best_genome) {
        HistoryRecord rec{generation, best, mean, elapsed()};
        result.history.push_back(rec);
        if (!have_best || best > result.best_fitness) {
            result.best_fitness = best;
            result.best_genome.assign(best_genome.begin(), best_genome.end());
            have_best = true;
        }
        if (on_generation) {
            on_generation(rec, best_genome);
        }
    };

    Population pop = init_population(params, genome_length, rng);
    for (std::size_t g = 0; g < params.generations; ++g) {
        const GenerationSummary s = evolve_generation(pop, factory(g), params, rng);
        record(s.generation, s.best_fitness, s.mean_fitness, s.best_genome);
    }
    evaluate_population(pop, factory(params.generations));
    const double mean =
        std::accumulate(pop.fitness.begin(), pop.fitness.end(), 0.0) / static_cast<double>(pop.size());
    record(pop.generation, pop.fitness.front(), mean, pop.individual(0));
    return result;
}

std::vector<std::uint64_t> training_episode_seeds(std::uint64_t train_seed, std::size_t generation,
                                                  std::size_t episodes, bool refresh)
{
    const std::uint64_t g = refresh ? generation : 0;
    std::vector<std::uint64_t> seeds(episodes);
    for (std::size_t e = 0; e < episodes; ++e) {
        seeds[e] = derive_seed(train_seed, {g, e});
    }
    return seeds;
}

FitnessFactory episode_fitness(const Policy& policy, const EvaluationContext& ctx, std::uint64_t train_seed,
                               const EvoParams& params)
{
    return [&policy, ctx, train_seed, params](std::size_t generation) -> FitnessFn {
        auto seeds = training_episode_seeds(train_seed, generation, params.t_e_train, params.refresh_episode_seeds);
        return [&policy, ctx, seeds = std::move(seeds)](std::span<const double> genome, std::size_t) {
            return evaluate_fitness(policy, genome, ctx, seeds);
        };
    };
}

} // namespace risne
