// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>

namespace risne {

/// splitmix64 finalizer. Used for seeding and for deriving child seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Derives a child seed from a parent seed and a sequence of tags. Distinct tag
/// sequences give statistically independent streams.
std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> tags);

/// xoshiro256** generator with all distributions implemented in-house, so that
/// equal seeds give bit-identical draws on every platform and standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64();

    /// Uniform double in [0, 1) with 53 bits of resolution.
    double uniform();

    /// Uniform integer in [0, n). Unbiased (rejection sampling). n must be > 0.
    std::size_t uniform_index(std::size_t n);

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal draw via Box-Muller (one draw per call, no caching).
    double normal();

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    std::complex<double> complex_normal(double variance = 1.0);

    /// Fisher-Yates shuffle.
    template <class T>
    void shuffle(std::span<T> values)
    {
        for (std::size_t i = values.size(); i > 1; --i) {
            const std::size_t j = uniform_index(i);
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::uint64_t seed_;
    std::array<std::uint64_t, 4> state_{};
};

} // namespace risne
