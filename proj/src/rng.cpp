// SPDX-License-Identifier: Apache-2.0
#include "risne/rng.hpp"

#include <cmath>
#include <numbers>

#include "risne/errors.hpp"

namespace risne {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k)
{
    return (x << k) | (x >> (64 - k));
}

} // namespace

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> tags)
{
    std::uint64_t h = splitmix64(parent ^ 0x52495331ULL);
    for (std::uint64_t tag : tags) {
        h = splitmix64(h ^ splitmix64(tag + 0x632be59bd9b4e019ULL));
    }
    return h;
}

Rng::Rng(std::uint64_t seed) : seed_(seed)
{
    std::uint64_t s = seed;
    for (auto& word : state_) {
        s += 0x9e3779b97f4a7c15ULL;
        word = splitmix64(s);
    }
}

std::uint64_t Rng::next_u64()
{
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Rng::uniform()
{
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::size_t Rng::uniform_index(std::size_t n)
{
    if (n == 0) {
        throw InputError("Rng::uniform_index: n must be positive");
    }
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x = next_u64();
    while (x >= limit) {
        x = next_u64();
    }
    return static_cast<std::size_t>(x % bound);
}

double Rng::normal()
{
    // u1 in (0, 1] keeps the log finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::complex<double> Rng::complex_normal(double variance)
{
    const double scale = std::sqrt(0.5 * variance);
    const double re = normal();
    const double im = normal();
    return {scale * re, scale * im};
}

} // namespace risne
