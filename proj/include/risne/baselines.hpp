// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "risne/channel.hpp"
#include "risne/policy.hpp"
#include "risne/rng.hpp"
#include "risne/system.hpp"

namespace risne {

/// Result of a per-block search baseline. Phases hold one config per RIS.
struct BaselineChoice {
    std::vector<PhaseConfig> phases;
    std::size_t precoder_index = 0;
    double gamma = 0.0;
    std::size_t evaluations = 0; ///< candidate (phases, precoder) pairs scored
};

/// Lightweight GA over binary phase strings, run once per codebook entry.
/// Generational with elitism, rank-proportional parent selection, single-point
/// crossover and bit-flip mutation.
struct LgaParams {
    std::size_t individuals = 15;
    std::size_t generations = 5;
    /// Bit-flip probability; unset means 1 / (number of phase bits).
    std::optional<double> p_mut;
    std::size_t elitism = 1;
    /// Optional seeded first generation, one bit string (symbols -1 / +1) per
    /// row. Missing rows are filled randomly.
    std::vector<std::vector<int>> initial_population;

    void validate() const;

    bool operator==(const LgaParams&) const = default;
};

/// Searches every precoder and keeps the best (phases, precoder) pair. The
/// returned gamma equals snr() of the returned pair.
BaselineChoice lga_solve(const ChannelSet& cs, const LinkBudget& budget, const Codebook& codebook,
                         const LgaParams& params, Rng& rng);

inline constexpr std::uint64_t kDefaultOracleCap = std::uint64_t{1} << 20;

/// Exact maximizer by enumeration of all binary phase strings times all
/// precoders. Ties go to the lexicographically lowest phase string (-1 < +1,
/// first element most significant), then the lowest precoder index.
BaselineChoice exhaustive_oracle(const ChannelSet& cs, const LinkBudget& budget, const Codebook& codebook,
                                 std::uint64_t cap = kDefaultOracleCap);

/// Uniform random binary phases and precoder index.
BaselineChoice random_baseline(const ChannelSet& cs, const Codebook& codebook, Rng& rng);

// --- policy adapters -----------------------------------------------------------
// Genome-free wrappers so baselines share the evaluation loop with the evolved
// policies. The genome passed to act() must be empty.

class RandomPolicy : public Policy {
public:
    explicit RandomPolicy(Codebook codebook) : codebook_(std::move(codebook)) {}
    std::string kind() const override { return "random"; }
    const GenomeLayout& layout() const override { return layout_; }
    PolicyOutput act(std::span<const double> genome, const ChannelSet& cs, Rng& rng, SelectMode mode) const override;

private:
    Codebook codebook_;
    GenomeLayout layout_;
};

class LgaPolicy : public Policy {
public:
    LgaPolicy(Codebook codebook, LinkBudget budget, LgaParams params);
    std::string kind() const override { return "lga"; }
    const GenomeLayout& layout() const override { return layout_; }
    PolicyOutput act(std::span<const double> genome, const ChannelSet& cs, Rng& rng, SelectMode mode) const override;

private:
    Codebook codebook_;
    LinkBudget budget_;
    LgaParams params_;
    GenomeLayout layout_;
};

class OraclePolicy : public Policy {
public:
    OraclePolicy(Codebook codebook, LinkBudget budget, std::uint64_t cap = kDefaultOracleCap);
    std::string kind() const override { return "oracle"; }
    const GenomeLayout& layout() const override { return layout_; }
    PolicyOutput act(std::span<const double> genome, const ChannelSet& cs, Rng& rng, SelectMode mode) const override;

private:
    Codebook codebook_;
    LinkBudget budget_;
    std::uint64_t cap_;
    GenomeLayout layout_;
};

} // namespace risne
