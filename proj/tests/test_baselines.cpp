// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "risne/baselines.hpp"
#include "test_util.hpp"

using namespace risne;
using risne::test::random_channels;
using risne::test::reference_snr;
using risne::test::rel_err;

namespace {

struct Brute {
    double gamma = -1.0;
    std::vector<std::vector<int>> symbols;
    std::size_t precoder = 0;
};

// Enumerates every symbol string with the reference SNR, independent of the
// library's ElementTerms fast path.
Brute brute_force(const ChannelSet& cs, const Codebook& cb, double scale)
{
    const std::size_t k = cs.h1.size();
    const std::size_t n_ris = cs.h2[0].rows();
    const std::size_t n = k * n_ris;
    Brute best;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        std::vector<std::vector<int>> sym(k, std::vector<int>(n_ris));
        for (std::size_t i = 0; i < n; ++i) {
            sym[i / n_ris][i % n_ris] = (mask >> i) & 1U ? 1 : -1;
        }
        for (std::size_t v = 0; v < cb.size(); ++v) {
            const double g = reference_snr(cs, sym, cb.vector(v), scale);
            if (g > best.gamma) {
                best = Brute{g, sym, v};
            }
        }
    }
    return best;
}

std::vector<std::vector<int>> values_of(const std::vector<PhaseConfig>& phases)
{
    std::vector<std::vector<int>> out;
    for (const auto& p : phases) {
        out.push_back(p.values);
    }
    return out;
}

} // namespace

TEST(Oracle, MatchesBruteForceEnumeration)
{
    Rng rng(1);
    const LinkBudget budget{3.0, 1.5};
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t k = 1 + trial % 2;
        const ChannelSet cs = random_channels(2, 4, k, rng, trial % 3 != 0);
        const Codebook cb = dft_codebook(2);
        const auto got = exhaustive_oracle(cs, budget, cb);
        const auto ref = brute_force(cs, cb, 2.0);
        EXPECT_LT(rel_err(got.gamma, ref.gamma), 1e-10);
        EXPECT_LT(rel_err(reference_snr(cs, values_of(got.phases), cb.vector(got.precoder_index), 2.0), ref.gamma),
                  1e-10);
        EXPECT_EQ(got.phases.size(), k);
        EXPECT_EQ(got.evaluations, (std::size_t{1} << (4 * k)) * 2);
    }
}

TEST(Oracle, SingleElementFollowsSignRule)
{
    // One element, one antenna, precoder [1]: gamma = |h* + c g*|^2 with
    // c = +1 for symbol -1. Pick the symbol that adds constructively.
    ChannelSet cs;
    cs.h = ComplexMatrix::column({Complex(1.0, 0.0)});
    cs.h1 = {ComplexMatrix::from_rows({{Complex(1.0, 0.0)}})};
    cs.h2 = {ComplexMatrix::column({Complex(-0.5, 0.0)})};
    const Codebook cb = dft_codebook(1);
    const auto got = exhaustive_oracle(cs, LinkBudget{1.0, 1.0}, cb);
    EXPECT_EQ(got.phases[0].values, std::vector<int>{1}); // c = -1 flips -0.5 to +0.5
    EXPECT_NEAR(got.gamma, 2.25, 1e-12);
}

TEST(Oracle, TiesResolveToLowestString)
{
    Rng rng(2);
    ChannelSet cs = random_channels(2, 3, 1, rng);
    cs.h1[0] = ComplexMatrix(2, 3);
    cs.h = ComplexMatrix(2, 1);
    const auto got = exhaustive_oracle(cs, LinkBudget{}, dft_codebook(2));
    EXPECT_EQ(got.phases[0].values, std::vector<int>(3, -1));
    EXPECT_EQ(got.precoder_index, 0u);
    EXPECT_EQ(got.gamma, 0.0);
}

TEST(Oracle, RefusesOversizedSearch)
{
    Rng rng(3);
    const ChannelSet big = random_channels(2, 20, 1, rng);
    EXPECT_THROW(exhaustive_oracle(big, LinkBudget{}, dft_codebook(2)), InputError);
    const ChannelSet two = random_channels(2, 10, 2, rng); // 20 elements in total
    EXPECT_THROW(exhaustive_oracle(two, LinkBudget{}, dft_codebook(2)), InputError);
    const ChannelSet ok = random_channels(2, 8, 1, rng);
    EXPECT_NO_THROW(exhaustive_oracle(ok, LinkBudget{}, dft_codebook(2), 512));
    EXPECT_THROW(exhaustive_oracle(ok, LinkBudget{}, dft_codebook(2), 511), InputError);
    EXPECT_THROW(exhaustive_oracle(ok, LinkBudget{}, dft_codebook(4)), InputError); // wrong dimension
}

TEST(Oracle, DominatesEveryOtherConfiguration)
{
    Rng rng(4);
    const LinkBudget budget{1.0, 0.01};
    const Codebook cb = dft_codebook(2);
    for (int trial = 0; trial < 30; ++trial) {
        const ChannelSet cs = random_channels(2, 8, 1, rng);
        const auto oracle = exhaustive_oracle(cs, budget, cb);
        const auto lga = lga_solve(cs, budget, cb, LgaParams{}, rng);
        const auto rnd = random_baseline(cs, cb, rng);
        const double g_rnd = snr(cs, rnd.phases, cb.vector(rnd.precoder_index), budget);
        EXPECT_LE(lga.gamma, oracle.gamma * (1.0 + 1e-12));
        EXPECT_LE(g_rnd, oracle.gamma * (1.0 + 1e-12));
    }
}

TEST(Lga, ReportedGammaIsExactSnr)
{
    Rng rng(5);
    const LinkBudget budget{2.0, 0.1};
    const Codebook cb = dft_codebook(4);
    for (int trial = 0; trial < 10; ++trial) {
        const ChannelSet cs = random_channels(4, 16, 1 + trial % 2, rng);
        const auto r = lga_solve(cs, budget, cb, LgaParams{}, rng);
        EXPECT_EQ(r.gamma, snr(cs, r.phases, cb.vector(r.precoder_index), budget));
        EXPECT_LT(r.precoder_index, 4u);
        for (const auto& p : r.phases) {
            EXPECT_NO_THROW(p.validate());
            EXPECT_EQ(p.size(), 16u);
        }
    }
}

TEST(Lga, EvaluationCount)
{
    Rng rng(6);
    const ChannelSet cs = random_channels(4, 16, 1, rng);
    LgaParams p;
    p.individuals = 15;
    p.generations = 5;
    p.elitism = 1;
    const auto r = lga_solve(cs, LinkBudget{}, dft_codebook(4), p, rng);
    EXPECT_EQ(r.evaluations, 4u * (15 + 5 * 14));
}

TEST(Lga, DeterministicPerSeed)
{
    Rng rng(7);
    const ChannelSet cs = random_channels(4, 16, 1, rng);
    Rng a(100);
    Rng b(100);
    const auto x = lga_solve(cs, LinkBudget{}, dft_codebook(4), LgaParams{}, a);
    const auto y = lga_solve(cs, LinkBudget{}, dft_codebook(4), LgaParams{}, b);
    EXPECT_EQ(x.phases, y.phases);
    EXPECT_EQ(x.precoder_index, y.precoder_index);
    EXPECT_EQ(x.gamma, y.gamma);
}

TEST(Lga, MoreGenerationsNeverHurtWithElitism)
{
    Rng rng(8);
    const Codebook cb = dft_codebook(2);
    for (int trial = 0; trial < 20; ++trial) {
        const ChannelSet cs = random_channels(2, 24, 1, rng);
        double last = -1.0;
        for (std::size_t g : {0, 1, 3, 6, 12}) {
            LgaParams p;
            p.generations = g;
            Rng local(trial);
            const double gamma = lga_solve(cs, LinkBudget{}, cb, p, local).gamma;
            EXPECT_GE(gamma, last * (1.0 - 1e-12));
            last = gamma;
        }
    }
}

TEST(Lga, SeededOptimumIsKept)
{
    Rng rng(9);
    const Codebook cb = dft_codebook(2);
    const LinkBudget budget{1.0, 0.5};
    const ChannelSet cs = random_channels(2, 10, 1, rng);
    const auto oracle = exhaustive_oracle(cs, budget, cb);
    LgaParams p;
    p.initial_population = {oracle.phases[0].values};
    const auto r = lga_solve(cs, budget, cb, p, rng);
    EXPECT_LT(rel_err(r.gamma, oracle.gamma), 1e-12);
}

TEST(Lga, Validation)
{
    LgaParams p;
    p.individuals = 1;
    EXPECT_THROW(p.validate(), ConfigError);
    p = LgaParams{};
    p.elitism = 15;
    EXPECT_THROW(p.validate(), ConfigError);
    p = LgaParams{};
    p.p_mut = 2.0;
    EXPECT_THROW(p.validate(), ConfigError);
    p = LgaParams{};
    p.initial_population = {{1, 0, 1}};
    Rng rng(10);
    EXPECT_THROW(lga_solve(random_channels(2, 3, 1, rng), LinkBudget{}, dft_codebook(2), p, rng), InputError);
}

TEST(RandomBaseline, ShapesAndUniformIndex)
{
    Rng rng(11);
    const ChannelSet cs = random_channels(4, 5, 2, rng);
    const Codebook cb = dft_codebook(4);
    std::vector<int> counts(4, 0);
    std::size_t plus = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const auto r = random_baseline(cs, cb, rng);
        ASSERT_EQ(r.phases.size(), 2u);
        for (const auto& p : r.phases) {
            ASSERT_EQ(p.size(), 5u);
            for (int s : p.values) {
                ASSERT_TRUE(s == 1 || s == -1);
                plus += s == 1;
            }
        }
        ++counts[r.precoder_index];
    }
    for (int c : counts) {
        EXPECT_NEAR(double(c) / n, 0.25, 0.015);
    }
    EXPECT_NEAR(double(plus) / (n * 10.0), 0.5, 0.01);
}

TEST(BaselinePolicies, OneHotOutputsAndEmptyGenome)
{
    Rng rng(12);
    const ChannelSet cs = random_channels(2, 6, 1, rng);
    const Codebook cb = dft_codebook(2);
    const LinkBudget budget{1.0, 0.1};
    const RandomPolicy random(cb);
    const LgaPolicy lga(cb, budget, LgaParams{});
    const OraclePolicy oracle(cb, budget);
    const std::vector<double> empty;
    for (const Policy* p : std::initializer_list<const Policy*>{&random, &lga, &oracle}) {
        EXPECT_EQ(p->layout().total(), 0u);
        const auto out = p->act(empty, cs, rng, SelectMode::argmax);
        EXPECT_EQ(out.precoder_probs[out.precoder_index], 1.0);
        EXPECT_EQ(out.phases.size(), 1u);
        const std::vector<double> one{0.0};
        EXPECT_THROW(p->act(one, cs, rng, SelectMode::argmax), InputError);
    }
    const auto best = oracle.act(empty, cs, rng, SelectMode::argmax);
    const auto ref = exhaustive_oracle(cs, budget, cb);
    EXPECT_EQ(best.phases, ref.phases);
    EXPECT_EQ(best.precoder_index, ref.precoder_index);
}

TEST(Oracle, BeatsRandomSamples)
{
    Rng rng(13);
    const Codebook cb = dft_codebook(2);
    const LinkBudget budget{1.0, 0.2};
    const ChannelSet cs = random_channels(2, 4, 1, rng);
    const auto oracle = exhaustive_oracle(cs, budget, cb);
    for (int i = 0; i < 1000; ++i) {
        const auto r = random_baseline(cs, cb, rng);
        EXPECT_LE(snr(cs, r.phases, cb.vector(r.precoder_index), budget), oracle.gamma * (1.0 + 1e-12));
    }
}

TEST(Oracle, ConsistentUnderElementPermutation)
{
    Rng rng(14);
    const Codebook cb = dft_codebook(2);
    const LinkBudget budget{1.0, 0.2};
    for (int trial = 0; trial < 20; ++trial) {
        const ChannelSet cs = random_channels(2, 6, 1, rng);
        std::vector<std::size_t> perm(6);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        rng.shuffle(std::span<std::size_t>(perm));
        ChannelSet moved = cs;
        for (std::size_t i = 0; i < 6; ++i) {
            moved.h2[0](i, 0) = cs.h2[0](perm[i], 0);
            for (std::size_t n = 0; n < 2; ++n) {
                moved.h1[0](n, i) = cs.h1[0](n, perm[i]);
            }
        }
        const auto a = exhaustive_oracle(cs, budget, cb);
        const auto b = exhaustive_oracle(moved, budget, cb);
        EXPECT_LT(rel_err(a.gamma, b.gamma), 1e-12);
        // Ties aside (random channels have none), the maximizer moves with the elements.
        for (std::size_t i = 0; i < 6; ++i) {
            EXPECT_EQ(b.phases[0].values[i], a.phases[0].values[perm[i]]);
        }
    }
}

TEST(Lga, ZeroChannelsGiveZeroGamma)
{
    ChannelSet cs;
    cs.h = ComplexMatrix(2, 1);
    cs.h1 = {ComplexMatrix(2, 5)};
    cs.h2 = {ComplexMatrix(5, 1)};
    Rng rng(15);
    EXPECT_EQ(lga_solve(cs, LinkBudget{}, dft_codebook(2), LgaParams{}, rng).gamma, 0.0);
    EXPECT_EQ(exhaustive_oracle(cs, LinkBudget{}, dft_codebook(2)).gamma, 0.0);
}

TEST(Lga, SingleElementSeededWithBothPhases)
{
    Rng rng(16);
    const Codebook cb = dft_codebook(2);
    for (int trial = 0; trial < 20; ++trial) {
        const ChannelSet cs = random_channels(2, 1, 1, rng);
        LgaParams p;
        p.individuals = 2;
        p.initial_population = {{-1}, {1}};
        const auto r = lga_solve(cs, LinkBudget{}, cb, p, rng);
        const auto ref = brute_force(cs, cb, 1.0);
        EXPECT_EQ(r.phases[0].values, ref.symbols[0]);
        EXPECT_LT(rel_err(r.gamma, ref.gamma), 1e-12);
    }
}
