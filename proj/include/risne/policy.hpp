// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "risne/channel.hpp"
#include "risne/rng.hpp"
#include "risne/system.hpp"

namespace risne {

enum class SelectMode { sample, argmax };

/// One named weight tensor inside a flat genome.
struct Segment {
    std::string name;
    std::size_t offset = 0;
    std::vector<std::size_t> shape;

    std::size_t size() const;

    bool operator==(const Segment&) const = default;
};

/// Maps offsets of a flat parameter vector onto named weight tensors. Segments
/// are contiguous, disjoint, and cover [0, total()).
class GenomeLayout {
public:
    void add(std::string name, std::vector<std::size_t> shape);

    std::size_t total() const { return total_; }
    std::span<const Segment> segments() const { return segments_; }
    const Segment& at(const std::string& name) const;
    bool contains(const std::string& name) const;

    std::span<const double> slice(std::span<const double> genome, const std::string& name) const;

    /// 2-D segment as a matrix view (shape[0] x shape[1]).
    MatrixView matrix(std::span<const double> genome, const std::string& name) const;

    /// FNV-1a hash of the segment names and shapes; stored in checkpoints.
    std::uint64_t fingerprint() const;

    bool operator==(const GenomeLayout&) const = default;

private:
    std::vector<Segment> segments_;
    std::size_t total_ = 0;
};

struct PolicyOutput {
    std::vector<PhaseConfig> phases; ///< one entry per RIS the policy controls
    std::size_t precoder_index = 0;
    std::vector<double> precoder_probs;
};

/// Index from a probability vector: inverse-CDF draw (one uniform) or argmax.
std::size_t select_index(std::span<const double> probs, Rng& rng, SelectMode mode);

/// A parameterized decision function: full channel set in, phases for every
/// controlled RIS plus a precoder out. Implementations are stateless apart from
/// their architecture, so one instance may serve concurrent evaluations.
class Policy {
public:
    virtual ~Policy() = default;

    virtual std::string kind() const = 0;
    virtual const GenomeLayout& layout() const = 0;
    virtual PolicyOutput act(std::span<const double> genome, const ChannelSet& cs, Rng& rng,
                             SelectMode mode) const = 0;

protected:
    void check_genome(std::span<const double> genome) const;
};

/// A policy that looks at the local channels of one RIS (plus the direct link)
/// and configures that RIS. Used standalone for single-RIS systems and as the
/// shared agent network in distributed multi-RIS control.
class RisAgentPolicy : public Policy {
public:
    virtual PolicyOutput forward(std::span<const double> genome, const ChannelSet& cs, std::size_t ris, Rng& rng,
                                 SelectMode mode) const = 0;

    /// Single-RIS systems only.
    PolicyOutput act(std::span<const double> genome, const ChannelSet& cs, Rng& rng,
                     SelectMode mode) const override;
};

} // namespace risne
