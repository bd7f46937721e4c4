// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "risne/policy.hpp"

namespace risne {

/// Plain fully-connected benchmark policy. With ris_count == 1 it acts as a
/// per-RIS agent; with ris_count == K it is the centralized variant that sees
/// every channel and configures all K surfaces at once.
struct FeedForwardArch {
    std::size_t n_tx = 16;
    std::size_t n_ris = 400;
    std::size_t codebook_size = 16;
    std::size_t ris_count = 1;
    std::vector<std::size_t> hidden{800, 600, 600, 500, 200};
    bool include_direct = false;
    bool normalize_inputs = true;

    std::size_t input_size() const;
    std::size_t phase_outputs() const { return ris_count * n_ris; }

    void validate() const;

    bool operator==(const FeedForwardArch&) const = default;
};

GenomeLayout feedforward_layout(const FeedForwardArch& arch);

class FeedForwardPolicy : public RisAgentPolicy {
public:
    explicit FeedForwardPolicy(FeedForwardArch arch);

    std::string kind() const override { return arch_.ris_count > 1 ? "ff_cent" : "ff"; }
    const GenomeLayout& layout() const override { return layout_; }
    const FeedForwardArch& arch() const { return arch_; }

    /// Per-RIS agent use; requires ris_count == 1.
    PolicyOutput forward(std::span<const double> genome, const ChannelSet& cs, std::size_t ris, Rng& rng,
                         SelectMode mode) const override;

    /// Centralized when ris_count > 1, otherwise the single-RIS path.
    PolicyOutput act(std::span<const double> genome, const ChannelSet& cs, Rng& rng,
                     SelectMode mode) const override;

private:
    PolicyOutput run(std::span<const double> genome, const ChannelSet& cs, std::span<const std::size_t> ris,
                     Rng& rng, SelectMode mode) const;

    FeedForwardArch arch_;
    GenomeLayout layout_;
};

} // namespace risne
