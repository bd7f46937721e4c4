// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <set>

#include "risne/cosyne.hpp"
#include "risne/parallel.hpp"
#include "test_util.hpp"

using namespace risne;
using risne::test::random_channels;
using risne::test::random_vector;

namespace {

/// Picks all-(+1) phases and the precoder given by round(genome[0]) mod |V|.
class ConstantPolicy : public Policy {
public:
    ConstantPolicy(std::size_t n_ris, std::size_t codebook) : n_ris_(n_ris), codebook_(codebook)
    {
        layout_.add("index", {1});
    }
    std::string kind() const override { return "constant"; }
    const GenomeLayout& layout() const override { return layout_; }
    PolicyOutput act(std::span<const double> genome, const ChannelSet& cs, Rng&, SelectMode) const override
    {
        check_genome(genome);
        PolicyOutput out;
        for (std::size_t k = 0; k < cs.h1.size(); ++k) {
            out.phases.push_back(PhaseConfig{std::vector<int>(n_ris_, 1), 2});
        }
        out.precoder_index = static_cast<std::size_t>(std::llround(std::abs(genome[0]))) % codebook_;
        out.precoder_probs.assign(codebook_, 0.0);
        out.precoder_probs[out.precoder_index] = 1.0;
        return out;
    }

private:
    std::size_t n_ris_;
    std::size_t codebook_;
    GenomeLayout layout_;
};

/// Bounded, non-negative toy objective with its optimum at w = target.
double sphere_fitness(std::span<const double> w)
{
    double d2 = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double t = 0.5 * static_cast<double>(i % 3) - 0.5;
        d2 += (w[i] - t) * (w[i] - t);
    }
    return 1.0 / (1.0 + d2);
}

EvoParams small_params()
{
    EvoParams p;
    p.l_pop = 20;
    p.generations = 10;
    return p;
}

} // namespace

// --- population and operators ---------------------------------------------------------

TEST(InitPopulation, ShapeAndMoments)
{
    EvoParams p;
    p.l_pop = 40;
    p.init_sigma = 0.5;
    Rng rng(1);
    const Population pop = init_population(p, 500, rng);
    EXPECT_EQ(pop.size(), 40u);
    EXPECT_EQ(pop.genome_length(), 500u);
    double mean = 0.0;
    double sq = 0.0;
    for (double w : pop.weights.data()) {
        mean += w;
        sq += w * w;
    }
    const double n = static_cast<double>(pop.weights.size());
    mean /= n;
    EXPECT_NEAR(mean, 0.0, 0.01);
    EXPECT_NEAR(sq / n - mean * mean, 0.25, 0.01);
}

TEST(Crossover, MaskedExample)
{
    const std::vector<double> p1{1, 2, 3, 4};
    const std::vector<double> p2{10, 20, 30, 40};
    EXPECT_EQ(crossover_masked(p1, p2, {true, false, false, true}), (std::vector<double>{1, 20, 30, 4}));
    EXPECT_THROW(crossover_masked(p1, p2, {true}), InputError);
    const std::vector<double> shorter{1, 2};
    Rng rng(2);
    EXPECT_THROW(crossover(p1, shorter, rng), InputError);
}

TEST(Crossover, GenesComeFromEitherParentAboutEvenly)
{
    Rng rng(3);
    const auto p1 = random_vector(10000, rng);
    const auto p2 = random_vector(10000, rng);
    const auto child = crossover(p1, p2, rng);
    std::size_t from_first = 0;
    for (std::size_t i = 0; i < child.size(); ++i) {
        ASSERT_TRUE(child[i] == p1[i] || child[i] == p2[i]);
        from_first += child[i] == p1[i];
    }
    EXPECT_NEAR(double(from_first) / child.size(), 0.5, 0.02);
}

TEST(Mutate, EdgeRates)
{
    Rng rng(4);
    const auto original = random_vector(100, rng);
    auto g = original;
    mutate(g, 0.0, 1.0, rng);
    EXPECT_EQ(g, original);
    mutate(g, 1.0, 0.0, rng);
    EXPECT_EQ(g, original);
    EXPECT_THROW(mutate(g, 1.5, 0.1, rng), InputError);
}

TEST(Mutate, RateAndNoiseScale)
{
    Rng rng(5);
    const std::size_t n = 200000;
    std::vector<double> g(n, 0.0);
    mutate(g, 0.3, 0.2, rng);
    std::size_t changed = 0;
    double sq = 0.0;
    for (double x : g) {
        if (x != 0.0) {
            ++changed;
            sq += x * x;
        }
    }
    EXPECT_NEAR(double(changed) / n, 0.3, 0.005);
    EXPECT_NEAR(sq / changed, 0.04, 0.002);
}

TEST(PermutationProbabilities, Examples)
{
    const std::vector<double> f{4.0, 1.0, 0.0};
    const auto p = permutation_probabilities(f, 4.0, 2);
    EXPECT_EQ(p[0], 0.0);
    EXPECT_NEAR(p[1], 0.5, 1e-15); // 1 - (1/4)^(1/2)
    EXPECT_EQ(p[2], 1.0);
    EXPECT_EQ(permutation_probabilities(f, 0.0, 2), std::vector<double>(3, 0.0));
    const std::vector<double> negative{-1.0};
    EXPECT_THROW(permutation_probabilities(negative, 1.0, 1), InputError);
}

TEST(PermutationProbabilities, MatchesPowFormAndStaysInUnitInterval)
{
    Rng rng(6);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t m = 1 + rng.uniform_index(1000000);
        std::vector<double> f(10);
        for (double& x : f) {
            x = 100.0 * rng.uniform();
        }
        std::sort(f.begin(), f.end(), std::greater<>());
        const auto p = permutation_probabilities(f, f.front(), m);
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double ref = 1.0 - std::pow(f[i] / f.front(), 1.0 / double(m));
            EXPECT_NEAR(p[i], ref, 1e-12);
            EXPECT_GE(p[i], 0.0);
            EXPECT_LE(p[i], 1.0);
            if (i > 0) {
                EXPECT_GE(p[i], p[i - 1]); // lower fitness, more permutation
            }
        }
    }
}

TEST(PermuteMarked, ZeroProbabilityLeavesWeights)
{
    Rng rng(7);
    RealMatrix w = risne::test::random_real(6, 9, rng);
    const RealMatrix before = w;
    permute_marked(w, std::vector<double>(6, 0.0), rng);
    EXPECT_EQ(w, before);
    EXPECT_THROW(permute_marked(w, std::vector<double>(5, 0.0), rng), InputError);
}

TEST(PermuteMarked, ColumnsKeepTheirMultisets)
{
    Rng rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        RealMatrix w = risne::test::random_real(8, 12, rng);
        const RealMatrix before = w;
        std::vector<double> probs(8);
        for (double& p : probs) {
            p = rng.uniform();
        }
        probs[0] = 0.0;
        permute_marked(w, probs, rng);
        for (std::size_t c = 0; c < 12; ++c) {
            std::vector<double> a;
            std::vector<double> b;
            for (std::size_t r = 0; r < 8; ++r) {
                a.push_back(before(r, c));
                b.push_back(w(r, c));
            }
            EXPECT_EQ(b[0], a[0]); // p = 0 row never moves
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            EXPECT_EQ(a, b);
        }
    }
}

TEST(PermuteMarked, FullMarkingMixesColumns)
{
    Rng rng(9);
    RealMatrix w(10, 200);
    for (std::size_t r = 0; r < 10; ++r) {
        for (std::size_t c = 0; c < 200; ++c) {
            w(r, c) = double(r);
        }
    }
    permute_marked(w, std::vector<double>(10, 1.0), rng);
    std::size_t moved = 0;
    for (std::size_t r = 0; r < 10; ++r) {
        for (std::size_t c = 0; c < 200; ++c) {
            moved += w(r, c) != double(r);
        }
    }
    // A uniform shuffle of 10 leaves on average one fixed point per column.
    EXPECT_NEAR(double(moved) / 2000.0, 0.9, 0.05);
}

// --- generation loop ------------------------------------------------------------------

TEST(EvaluatePopulation, SortsDescendingAndKeepsRowsPaired)
{
    Rng rng(10);
    EvoParams p = small_params();
    Population pop = init_population(p, 6, rng);
    evaluate_population(pop, [](std::span<const double> g, std::size_t) { return sphere_fitness(g); });
    ASSERT_EQ(pop.fitness.size(), 20u);
    for (std::size_t i = 0; i < 20; ++i) {
        EXPECT_EQ(pop.fitness[i], sphere_fitness(pop.individual(i)));
        if (i > 0) {
            EXPECT_GE(pop.fitness[i - 1], pop.fitness[i]);
        }
    }
}

TEST(EvaluatePopulation, TiesKeepOriginalOrder)
{
    Population pop;
    pop.weights = RealMatrix::from_rows({{0.0}, {1.0}, {2.0}, {3.0}});
    evaluate_population(pop, [](std::span<const double> g, std::size_t) { return g[0] >= 2.0 ? 1.0 : 0.0; });
    EXPECT_EQ(pop.weights, RealMatrix::from_rows({{2.0}, {3.0}, {0.0}, {1.0}}));
}

TEST(EvaluatePopulation, IndependentOfThreadCount)
{
    auto run = [](const char* threads) {
        setenv(kThreadsEnvVar, threads, 1);
        Rng rng(11);
        EvoParams p = small_params();
        Population pop = init_population(p, 30, rng);
        evaluate_population(pop, [](std::span<const double> g, std::size_t) { return sphere_fitness(g); });
        return pop;
    };
    const Population a = run("1");
    const Population b = run("4");
    unsetenv(kThreadsEnvVar);
    EXPECT_EQ(a.weights, b.weights);
    EXPECT_EQ(a.fitness, b.fitness);
}

TEST(Counts, ParentsAndOffspringFillThePopulation)
{
    EXPECT_EQ(parent_count(100), 25u);
    EXPECT_EQ(offspring_count(100), 75u);
    EXPECT_EQ(parent_count(4), 1u);
    for (std::size_t l = 4; l < 300; ++l) {
        EXPECT_EQ(parent_count(l) + offspring_count(l), l);
        EXPECT_GE(parent_count(l), 1u);
    }
}

TEST(EvolveGeneration, ParentsSurviveWithoutPermutation)
{
    Rng rng(12);
    EvoParams p = small_params();
    p.permutation_enabled = false;
    Population pop = init_population(p, 8, rng);
    const FitnessFn f = [](std::span<const double> g, std::size_t) { return sphere_fitness(g); };
    const auto summary = evolve_generation(pop, f, p, rng);
    EXPECT_EQ(pop.size(), 20u);
    EXPECT_EQ(pop.generation, 1u);
    EXPECT_EQ(summary.generation, 0u);
    EXPECT_EQ(summary.best_fitness, sphere_fitness(summary.best_genome));
    // Rows 0..4 are the sorted parents, untouched.
    Population again = pop;
    evaluate_population(again, f);
    EXPECT_EQ(again.fitness.front(), std::max(summary.best_fitness, again.fitness.front()));
    for (std::size_t i = 0; i < parent_count(20); ++i) {
        EXPECT_EQ(sphere_fitness(pop.individual(i)), pop.fitness[i]);
    }
}

TEST(EvolveGeneration, BestIsMonotoneWithoutPermutation)
{
    Rng rng(13);
    EvoParams p = small_params();
    p.permutation_enabled = false;
    Population pop = init_population(p, 10, rng);
    const FitnessFn f = [](std::span<const double> g, std::size_t) { return sphere_fitness(g); };
    double last = -1.0;
    for (int g = 0; g < 30; ++g) {
        const auto s = evolve_generation(pop, f, p, rng);
        EXPECT_GE(s.best_fitness, last);
        last = s.best_fitness;
    }
}

TEST(EvolveGeneration, ElitePermutationProbabilityIsZero)
{
    Rng rng(14);
    EvoParams p = small_params();
    Population pop = init_population(p, 50, rng);
    const FitnessFn f = [](std::span<const double> g, std::size_t) { return sphere_fitness(g); };
    for (int g = 0; g < 10; ++g) {
        const auto s = evolve_generation(pop, f, p, rng);
        // The top row has p_perm = 0 and is never replaced by offspring.
        const auto row0 = pop.individual(0);
        EXPECT_TRUE(std::equal(row0.begin(), row0.end(), s.best_genome.begin()));
    }
}

TEST(EvolveGeneration, SingleParentClonesTheBest)
{
    Rng rng(15);
    EvoParams p;
    p.l_pop = 4;
    p.p_mut = 0.0;
    p.permutation_enabled = false;
    Population pop = init_population(p, 5, rng);
    const FitnessFn f = [](std::span<const double> g, std::size_t) { return sphere_fitness(g); };
    evolve_generation(pop, f, p, rng);
    for (std::size_t r = 1; r < 4; ++r) {
        const auto row = pop.individual(r);
        EXPECT_TRUE(std::equal(row.begin(), row.end(), pop.individual(0).begin()));
    }
}

TEST(EvolveGeneration, RejectsMismatchedPopulation)
{
    Rng rng(16);
    EvoParams p = small_params();
    Population pop = init_population(p, 3, rng);
    p.l_pop = 24;
    EXPECT_THROW(evolve_generation(
                     pop, [](std::span<const double>, std::size_t) { return 1.0; }, p, rng),
                 InputError);
}

TEST(Train, HistoryLengthBestAndReproducibility)
{
    EvoParams p = small_params();
    const FitnessFactory factory = [](std::size_t) {
        return FitnessFn([](std::span<const double> g, std::size_t) { return sphere_fitness(g); });
    };
    std::size_t calls = 0;
    Rng r1(17);
    const auto a = train(12, factory, p, r1, [&](const HistoryRecord&, std::span<const double>) { ++calls; });
    Rng r2(17);
    const auto b = train(12, factory, p, r2);
    EXPECT_EQ(a.history.size(), p.generations + 1);
    EXPECT_EQ(calls, p.generations + 1);
    double best = 0.0;
    for (std::size_t g = 0; g < a.history.size(); ++g) {
        EXPECT_EQ(a.history[g].generation, g);
        best = std::max(best, a.history[g].best_fitness);
        EXPECT_EQ(a.history[g].best_fitness, b.history[g].best_fitness);
        EXPECT_EQ(a.history[g].mean_fitness, b.history[g].mean_fitness);
    }
    EXPECT_EQ(a.best_fitness, best);
    EXPECT_EQ(a.best_genome, b.best_genome);
    EXPECT_EQ(sphere_fitness(a.best_genome), a.best_fitness);
}

TEST(Train, ImprovesToyObjective)
{
    EvoParams p;
    p.l_pop = 40;
    p.generations = 60;
    const FitnessFactory factory = [](std::size_t) {
        return FitnessFn([](std::span<const double> g, std::size_t) { return sphere_fitness(g); });
    };
    Rng rng(18);
    const auto r = train(6, factory, p, rng);
    EXPECT_GT(r.best_fitness, r.history.front().best_fitness);
    EXPECT_GT(r.best_fitness, 0.9);
}

// --- episode fitness ------------------------------------------------------------------

TEST(TrainingSeeds, RefreshAndDerivation)
{
    const auto g0 = training_episode_seeds(99, 0, 3, true);
    const auto g1 = training_episode_seeds(99, 1, 3, true);
    EXPECT_NE(g0, g1);
    EXPECT_EQ(g0, training_episode_seeds(99, 0, 3, true));
    EXPECT_EQ(training_episode_seeds(99, 5, 3, false), g0);
    EXPECT_EQ(g1[2], derive_seed(99, {1, 2}));
    EXPECT_EQ(std::set<std::uint64_t>(g0.begin(), g0.end()).size(), 3u);
}

TEST(EvaluateFitness, FixedChannelEqualsDirectSnr)
{
    Rng rng(19);
    const ChannelSet cs = random_channels(4, 6, 1, rng);
    FixedChannelSource source(cs);
    const Codebook cb = dft_codebook(4);
    const ConstantPolicy policy(6, 4);
    EvaluationContext ctx{&source, cb, LinkBudget{2.0, 0.5}, 5, SelectMode::argmax};
    const std::vector<std::uint64_t> seeds{1, 2, 3};
    const std::vector<double> genome{2.0};
    const std::vector<PhaseConfig> phases{PhaseConfig{std::vector<int>(6, 1), 2}};
    const double expected = snr(cs, phases, cb.vector(2), ctx.budget);
    EXPECT_NEAR(evaluate_fitness(policy, genome, ctx, seeds), expected, 1e-12 * expected);
    const double ref = 4.0 * risne::test::reference_snr(cs, {std::vector<int>(6, 1)}, cb.vector(2), 1.0);
    EXPECT_NEAR(expected, ref, 1e-10 * ref);
}

TEST(EvaluateFitness, ObserverSeesEveryStepAndAveragesToResult)
{
    ScenarioConfig sc;
    sc.n_tx = 2;
    sc.n_ris = 4;
    StochasticChannelSource source(sc);
    const ConstantPolicy policy(4, 2);
    EvaluationContext ctx{&source, dft_codebook(2), LinkBudget::from_scenario(sc), 7, SelectMode::argmax};
    const std::vector<std::uint64_t> seeds{11, 12};
    std::size_t count = 0;
    double sum = 0.0;
    const std::vector<double> genome{1.0};
    const double f = evaluate_fitness(policy, genome, ctx, seeds, [&](std::size_t e, std::size_t t, double g) {
        EXPECT_LT(e, 2u);
        EXPECT_LT(t, 7u);
        ++count;
        sum += g;
    });
    EXPECT_EQ(count, 14u);
    EXPECT_NEAR(f, sum / 14.0, 1e-12 * f);
    EXPECT_EQ(f, evaluate_fitness(policy, genome, ctx, seeds));
}

TEST(EvaluateFitness, CommonRandomNumbersAcrossIndividuals)
{
    ScenarioConfig sc;
    sc.n_tx = 2;
    sc.n_ris = 4;
    StochasticChannelSource source(sc);
    const ConstantPolicy policy(4, 2);
    EvaluationContext ctx{&source, dft_codebook(2), LinkBudget::from_scenario(sc), 3, SelectMode::sample};
    EvoParams p;
    p.t_e_train = 2;
    const auto factory = episode_fitness(policy, ctx, 5, p);
    const FitnessFn f0 = factory(0);
    const std::vector<double> genome{0.0};
    // Same genome, different individual slot: identical episodes, identical fitness.
    EXPECT_EQ(f0(genome, 0), f0(genome, 7));
    EXPECT_NE(f0(genome, 0), factory(1)(genome, 0));
}

TEST(EvaluateFitness, RejectsMissingSourceAndEmptySeeds)
{
    const ConstantPolicy policy(4, 2);
    EvaluationContext ctx;
    ctx.codebook = dft_codebook(2);
    const std::vector<std::uint64_t> seeds{1};
    const std::vector<double> genome{0.0};
    EXPECT_THROW(evaluate_fitness(policy, genome, ctx, seeds), InputError);
    Rng rng(20);
    FixedChannelSource source(random_channels(2, 4, 1, rng));
    ctx.source = &source;
    EXPECT_THROW(evaluate_fitness(policy, genome, ctx, std::span<const std::uint64_t>{}), InputError);
}

TEST(EvoParams, Validation)
{
    EvoParams p;
    EXPECT_NO_THROW(p.validate());
    p.l_pop = 3;
    EXPECT_THROW(p.validate(), ConfigError);
    p = EvoParams{};
    p.p_mut = 1.5;
    try {
        p.validate();
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("p_mut"), std::string::npos);
    }
}
