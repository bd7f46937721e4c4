// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <numeric>

#include "risne/numerics.hpp"
#include "risne/parallel.hpp"
#include "risne/rng.hpp"
#include "test_util.hpp"

using namespace risne;
using risne::test::random_complex;
using risne::test::random_real;

// --- rng ------------------------------------------------------------------------

TEST(Rng, SplitmixReferenceValue)
{
    // First output of the published splitmix64 generator seeded with 0.
    EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
}

TEST(Rng, PinnedXoshiroSequence)
{
    // Computed with a separate script implementing the same seeding.
    Rng rng(42);
    EXPECT_EQ(rng.next_u64(), 0xbe15272cdf80b6c2ULL);
    EXPECT_EQ(rng.next_u64(), 0xaf6e2ee49ff5d0e3ULL);
    EXPECT_EQ(rng.next_u64(), 0xca56edd0338a318fULL);
}

TEST(Rng, EqualSeedsGiveEqualStreams)
{
    Rng a(123);
    Rng b(123);
    Rng c(124);
    bool differs = false;
    for (int i = 0; i < 1000; ++i) {
        const auto x = a.next_u64();
        EXPECT_EQ(x, b.next_u64());
        differs |= x != c.next_u64();
    }
    EXPECT_TRUE(differs);
}

TEST(Rng, DeriveSeedSeparatesNamespaces)
{
    EXPECT_NE(derive_seed(1, {0}), derive_seed(1, {1}));
    EXPECT_NE(derive_seed(1, {0, 1}), derive_seed(1, {1, 0}));
    EXPECT_NE(derive_seed(1, {2}), derive_seed(2, {2}));
    EXPECT_EQ(derive_seed(9, {3, 4}), derive_seed(9, {3, 4}));
}

TEST(Rng, UniformAndNormalMoments)
{
    Rng rng(5);
    const int n = 200000;
    double su = 0.0;
    double sn = 0.0;
    double sn2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        su += u;
        const double z = rng.normal();
        sn += z;
        sn2 += z * z;
    }
    EXPECT_NEAR(su / n, 0.5, 0.005);
    EXPECT_NEAR(sn / n, 0.0, 0.01);
    EXPECT_NEAR(sn2 / n, 1.0, 0.015);
}

TEST(Rng, ComplexNormalSplitsVariance)
{
    Rng rng(6);
    const int n = 100000;
    double re2 = 0.0;
    double im2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto z = rng.complex_normal(2.0);
        re2 += z.real() * z.real();
        im2 += z.imag() * z.imag();
    }
    EXPECT_NEAR(re2 / n, 1.0, 0.03);
    EXPECT_NEAR(im2 / n, 1.0, 0.03);
}

TEST(Rng, UniformIndexCoversRangeAndRejectsZero)
{
    Rng rng(8);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) {
        ++counts[rng.uniform_index(7)];
    }
    for (int c : counts) {
        EXPECT_NEAR(c, 10000, 400);
    }
    EXPECT_THROW(rng.uniform_index(0), InputError);
}

TEST(Rng, ShuffleIsAPermutation)
{
    Rng rng(9);
    std::vector<int> v(50);
    std::iota(v.begin(), v.end(), 0);
    rng.shuffle(std::span<int>(v));
    std::vector<int> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 50; ++i) {
        EXPECT_EQ(sorted[i], i);
    }
}

// --- complex matmul ---------------------------------------------------------------

TEST(CplxMatmul, IdentityLeavesMatrixUnchanged)
{
    Rng rng(1);
    const ComplexMatrix x = random_complex(2, 3, rng);
    const ComplexMatrix eye = ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, 1.0}});
    EXPECT_EQ(cplx_matmul(eye, x), x);
}

TEST(CplxMatmul, ImaginaryUnitSquared)
{
    const ComplexMatrix j = ComplexMatrix::from_rows({{Complex(0.0, 1.0)}});
    const ComplexMatrix r = cplx_matmul(j, j);
    EXPECT_EQ(r(0, 0), Complex(-1.0, 0.0));
}

TEST(CplxMatmul, MatchesTripleLoop)
{
    Rng rng(2);
    const ComplexMatrix a = random_complex(3, 4, rng);
    const ComplexMatrix b = random_complex(4, 2, rng);
    const ComplexMatrix c = cplx_matmul(a, b);
    ASSERT_EQ(c.rows(), 3u);
    ASSERT_EQ(c.cols(), 2u);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            double re = 0.0;
            double im = 0.0;
            for (std::size_t k = 0; k < 4; ++k) {
                re += a(i, k).real() * b(k, j).real() - a(i, k).imag() * b(k, j).imag();
                im += a(i, k).real() * b(k, j).imag() + a(i, k).imag() * b(k, j).real();
            }
            EXPECT_LE(std::abs(c(i, j) - Complex(re, im)), 1e-12 * std::abs(Complex(re, im)));
        }
    }
}

TEST(CplxMatmul, RejectsMismatchedDims)
{
    EXPECT_THROW(cplx_matmul(ComplexMatrix(2, 3), ComplexMatrix(2, 3)), InputError);
}

TEST(CplxMatmul, AssociativeOnRandomTriples)
{
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = random_complex(3, 4, rng);
        const auto b = random_complex(4, 5, rng);
        const auto c = random_complex(5, 2, rng);
        const auto left = cplx_matmul(cplx_matmul(a, b), c);
        const auto right = cplx_matmul(a, cplx_matmul(b, c));
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < left.size(); ++i) {
            num += std::norm(left[i] - right[i]);
            den += std::norm(left[i]);
        }
        EXPECT_LE(std::sqrt(num / den), 1e-9);
    }
}

TEST(ConjTranspose, SwapsAndConjugates)
{
    const ComplexMatrix a = ComplexMatrix::from_rows({{Complex(1, 2), Complex(3, -4)}});
    const ComplexMatrix t = conj_transpose(a);
    ASSERT_EQ(t.rows(), 2u);
    EXPECT_EQ(t(0, 0), Complex(1, -2));
    EXPECT_EQ(t(1, 0), Complex(3, 4));
}

// --- softmax ----------------------------------------------------------------------

TEST(SoftmaxGlobal, ZeroMatrixIsUniform)
{
    const RealMatrix s = softmax_global(RealMatrix(2, 2, 0.0));
    for (double x : s.data()) {
        EXPECT_DOUBLE_EQ(x, 0.25);
    }
}

TEST(SoftmaxGlobal, LogTwoExample)
{
    const RealMatrix s = softmax_global(RealMatrix::from_rows({{std::log(2.0), 0.0}, {0.0, 0.0}}));
    EXPECT_NEAR(s(0, 0), 0.4, 1e-15);
    EXPECT_NEAR(s(0, 1), 0.2, 1e-15);
    EXPECT_NEAR(s(1, 0), 0.2, 1e-15);
    EXPECT_NEAR(s(1, 1), 0.2, 1e-15);
}

TEST(SoftmaxGlobal, MatchesDirectFormula)
{
    Rng rng(4);
    const RealMatrix m = random_real(5, 5, rng, 3.0);
    const RealMatrix s = softmax_global(m);
    const double mx = *std::max_element(m.data().begin(), m.data().end());
    double total = 0.0;
    for (double x : m.data()) {
        total += std::exp(x - mx);
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
        EXPECT_NEAR(s[i], std::exp(m[i] - mx) / total, 1e-12);
    }
}

TEST(SoftmaxGlobal, SumsToOneAndStaysInOpenInterval)
{
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const RealMatrix s = softmax_global(random_real(1 + trial % 7, 1 + trial % 5, rng, 10.0));
        double sum = 0.0;
        for (double x : s.data()) {
            EXPECT_GT(x, 0.0);
            EXPECT_LE(x, 1.0);
            sum += x;
        }
        EXPECT_NEAR(sum, 1.0, 1e-9);
    }
}

TEST(SoftmaxGlobal, LargeLogitsDoNotOverflow)
{
    const RealMatrix s = softmax_global(RealMatrix::from_rows({{1000.0, 999.0}}));
    EXPECT_NEAR(s(0, 0), 1.0 / (1.0 + std::exp(-1.0)), 1e-12);
}

TEST(SoftmaxGlobal, RejectsNonFinite)
{
    EXPECT_THROW(softmax_global(RealMatrix::from_rows({{0.0, NAN}})), InputError);
    EXPECT_THROW(softmax_global(RealMatrix::from_rows({{INFINITY}})), InputError);
}

// --- layer norm -------------------------------------------------------------------

TEST(LayerNorm, AlreadyNormalRowIsNearlyUnchanged)
{
    const RealMatrix out = layer_norm(RealMatrix::from_rows({{1.0, -1.0}}));
    // var = 1, so out = x / sqrt(1 + eps).
    EXPECT_NEAR(out(0, 0), 1.0 / std::sqrt(1.0 + kLayerNormEpsilon), 1e-15);
    EXPECT_NEAR(out(0, 1), -1.0 / std::sqrt(1.0 + kLayerNormEpsilon), 1e-15);
}

TEST(LayerNorm, ConstantRowMapsToZero)
{
    const RealMatrix out = layer_norm(RealMatrix::from_rows({{5.0, 5.0, 5.0}}));
    for (double x : out.data()) {
        EXPECT_EQ(x, 0.0);
    }
}

TEST(LayerNorm, RandomRowMoments)
{
    Rng rng(6);
    const RealMatrix out = layer_norm(random_real(4, 30, rng, 2.0));
    for (std::size_t r = 0; r < out.rows(); ++r) {
        const auto row = out.row(r);
        const double mean = std::accumulate(row.begin(), row.end(), 0.0) / row.size();
        double var = 0.0;
        for (double x : row) {
            var += (x - mean) * (x - mean);
        }
        var /= row.size();
        EXPECT_LT(std::abs(mean), 1e-9);
        EXPECT_NEAR(var, 1.0, 1e-5);
    }
}

TEST(LayerNorm, InvariantToShiftAndPositiveScale)
{
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const RealMatrix m = random_real(3, 8, rng);
        RealMatrix moved = m;
        const double shift = 10.0 * rng.normal();
        const double scale = 0.5 + 5.0 * rng.uniform();
        for (double& x : moved.data()) {
            x = scale * x + shift;
        }
        // Scale invariance is exact only without the epsilon floor.
        const RealMatrix a = layer_norm(m, 0.0);
        const RealMatrix b = layer_norm(moved, 0.0);
        for (std::size_t i = 0; i < a.size(); ++i) {
            EXPECT_NEAR(a[i], b[i], 1e-9);
        }
    }
}

// --- conv ---------------------------------------------------------------------------

namespace {

Tensor3 conv_oracle(const Tensor3& in, const std::vector<double>& k, std::size_t c_out, std::size_t ks,
                    const std::vector<double>& bias)
{
    const long pad = static_cast<long>(ks / 2);
    Tensor3 out(c_out, in.height, in.width);
    for (std::size_t o = 0; o < c_out; ++o) {
        for (long y = 0; y < static_cast<long>(in.height); ++y) {
            for (long x = 0; x < static_cast<long>(in.width); ++x) {
                double acc = bias[o];
                for (std::size_t i = 0; i < in.channels; ++i) {
                    for (long dy = 0; dy < static_cast<long>(ks); ++dy) {
                        for (long dx = 0; dx < static_cast<long>(ks); ++dx) {
                            const long yy = y + dy - pad;
                            const long xx = x + dx - pad;
                            if (yy < 0 || xx < 0 || yy >= static_cast<long>(in.height) ||
                                xx >= static_cast<long>(in.width)) {
                                continue;
                            }
                            acc += k[((o * in.channels + i) * ks + dy) * ks + dx] * in.at(i, yy, xx);
                        }
                    }
                }
                out.at(o, y, x) = acc;
            }
        }
    }
    return out;
}

} // namespace

TEST(Conv2dSame, IdentityKernel)
{
    Rng rng(8);
    Tensor3 in(1, 4, 5);
    for (double& x : in.data) {
        x = rng.normal();
    }
    const std::vector<double> k{1.0};
    const std::vector<double> b{0.0};
    const Tensor3 out = conv2d_same(in, ConvKernelView{k, 1, 1, 1}, b);
    EXPECT_EQ(out.data, in.data);
}

TEST(Conv2dSame, ZeroKernelsGiveBias)
{
    Tensor3 in(1, 3, 3, 2.0);
    const std::vector<double> k(2 * 9, 0.0);
    const std::vector<double> b{0.5, -1.5};
    const Tensor3 out = conv2d_same(in, ConvKernelView{k, 2, 1, 3}, b);
    for (std::size_t y = 0; y < 3; ++y) {
        for (std::size_t x = 0; x < 3; ++x) {
            EXPECT_EQ(out.at(0, y, x), 0.5);
            EXPECT_EQ(out.at(1, y, x), -1.5);
        }
    }
}

TEST(Conv2dSame, MatchesLoopOracle)
{
    Rng rng(9);
    Tensor3 in(1, 6, 6);
    for (double& x : in.data) {
        x = rng.normal();
    }
    const auto k = risne::test::random_vector(2 * 1 * 3 * 3, rng);
    const auto b = risne::test::random_vector(2, rng);
    const Tensor3 out = conv2d_same(in, ConvKernelView{k, 2, 1, 3}, b);
    const Tensor3 ref = conv_oracle(in, k, 2, 3, b);
    ASSERT_EQ(out.data.size(), ref.data.size());
    for (std::size_t i = 0; i < ref.data.size(); ++i) {
        EXPECT_NEAR(out.data[i], ref.data[i], 1e-12 * std::max(1.0, std::abs(ref.data[i])));
    }
}

TEST(Conv2dSame, MultiChannelMatchesOracle)
{
    Rng rng(10);
    Tensor3 in(3, 5, 4);
    for (double& x : in.data) {
        x = rng.normal();
    }
    const auto k = risne::test::random_vector(2 * 3 * 5 * 5, rng);
    const auto b = risne::test::random_vector(2, rng);
    const Tensor3 out = conv2d_same(in, ConvKernelView{k, 2, 3, 5}, b);
    const Tensor3 ref = conv_oracle(in, k, 2, 5, b);
    for (std::size_t i = 0; i < ref.data.size(); ++i) {
        EXPECT_NEAR(out.data[i], ref.data[i], 1e-12 * std::max(1.0, std::abs(ref.data[i])));
    }
}

TEST(Conv2dSame, EvenKernelRejected)
{
    Tensor3 in(1, 3, 3);
    const std::vector<double> k(4, 0.0);
    const std::vector<double> b{0.0};
    EXPECT_THROW(conv2d_same(in, ConvKernelView{k, 1, 1, 2}, b), ConfigError);
}

// --- dense / argmax -------------------------------------------------------------------

TEST(Dense, AffineMap)
{
    const RealMatrix w = RealMatrix::from_rows({{1.0, 2.0}, {0.0, -1.0}, {3.0, 0.5}});
    const std::vector<double> b{0.5, 0.0, -1.0};
    const std::vector<double> x{2.0, 4.0};
    const auto y = dense(w, b, x);
    ASSERT_EQ(y.size(), 3u);
    EXPECT_EQ(y[0], 10.5);
    EXPECT_EQ(y[1], -4.0);
    EXPECT_EQ(y[2], 7.0);
}

TEST(Argmax, LowestIndexWinsTies)
{
    const std::vector<double> v{0.2, 0.7, 0.7, 0.1};
    EXPECT_EQ(argmax(v), 1u);
    const std::vector<double> p{0.1, 0.7, 0.2};
    EXPECT_EQ(argmax(p), 1u);
}

TEST(Matmul, TransposedVariantAgrees)
{
    Rng rng(11);
    const RealMatrix a = random_real(3, 4, rng);
    const RealMatrix b = random_real(5, 4, rng);
    const RealMatrix c1 = matmul_transposed(a, b);
    const RealMatrix bt = b.transpose();
    const RealMatrix c2 = matmul(a, bt);
    for (std::size_t i = 0; i < c1.size(); ++i) {
        EXPECT_NEAR(c1[i], c2[i], 1e-12);
    }
}

// --- parallel -----------------------------------------------------------------------

TEST(ParallelFor, VisitsEveryIndexOnce)
{
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; }, 4);
    for (const auto& h : hits) {
        EXPECT_EQ(h.load(), 1);
    }
}

TEST(ParallelFor, PropagatesExceptions)
{
    EXPECT_THROW(parallel_for(
                     10,
                     [](std::size_t i) {
                         if (i == 7) {
                             throw InputError("boom");
                         }
                     },
                     3),
                 InputError);
}
