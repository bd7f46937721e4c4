// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "risne/cosyne.hpp"
#include "risne/mbacnn.hpp"
#include "risne/policy.hpp"

namespace risne {

enum class VoteEncoding { one_hot, raw_index };

/// RX-side network turning the K agent votes into the final precoder.
struct AggregatorConfig {
    std::size_t hidden = 16;
    VoteEncoding encoding = VoteEncoding::one_hot;
    /// No aggregator network: every agent selects its precoder with the
    /// rollout's select mode and the plurality vote wins (lowest index on
    /// ties). With K = 1 this is exactly the single-RIS pipeline.
    bool bypass = false;

    void validate() const;

    bool operator==(const AggregatorConfig&) const = default;
};

std::string to_string(VoteEncoding encoding);
VoteEncoding vote_encoding_from_string(const std::string& name);

/// Network input for a vote vector: K * |V| one-hot entries, or K raw indices.
std::vector<double> encode_votes(std::span<const std::size_t> votes, std::size_t codebook_size, VoteEncoding encoding);

GenomeLayout aggregator_layout(const AggregatorConfig& cfg, std::size_t ris_count, std::size_t codebook_size);

struct AgentDecision {
    PhaseConfig phases;
    std::size_t vote = 0;
    std::vector<double> probs;
};

/// Runs the shared agent network on RIS k's local channels. The vote is the
/// argmax of the precoder probabilities.
AgentDecision agent_act(const RisAgentPolicy& agent, std::span<const double> agent_genome, const ChannelSet& cs,
                        std::size_t k, Rng& rng);

/// One-hot (or raw) votes -> ReLU hidden layer -> softmax -> select.
PrecoderChoice aggregate_precoder(const GenomeLayout& layout, std::span<const double> aggregator_genome,
                                  std::span<const std::size_t> votes, std::size_t codebook_size,
                                  VoteEncoding encoding, Rng& rng, SelectMode mode);

/// K agents sharing one genome plus the aggregator; the joint genome is
/// (agent weights, aggregator weights) and is evolved as a single vector.
class MultiRisPolicy : public Policy {
public:
    MultiRisPolicy(std::shared_ptr<const RisAgentPolicy> agent, AggregatorConfig cfg, std::size_t ris_count,
                   std::size_t codebook_size);

    std::string kind() const override { return "mbacnn_multi"; }
    const GenomeLayout& layout() const override { return layout_; }
    const RisAgentPolicy& agent() const { return *agent_; }
    const AggregatorConfig& aggregator() const { return cfg_; }
    std::size_t ris_count() const { return ris_count_; }

    std::span<const double> agent_genome(std::span<const double> genome) const;
    std::span<const double> aggregator_genome(std::span<const double> genome) const;

    PolicyOutput act(std::span<const double> genome, const ChannelSet& cs, Rng& rng, SelectMode mode) const override;

private:
    std::shared_ptr<const RisAgentPolicy> agent_;
    AggregatorConfig cfg_;
    std::size_t ris_count_;
    std::size_t codebook_size_;
    std::size_t agent_size_;
    GenomeLayout aggregator_layout_;
    GenomeLayout layout_;
};

/// Mean gamma over the episodes: every step samples all channels, each agent
/// acts, the votes are aggregated and the chosen pair is scored.
double evaluate_fitness_multi(const MultiRisPolicy& policy, std::span<const double> genome,
                              const EvaluationContext& ctx, std::span<const std::uint64_t> episode_seeds,
                              const StepObserver& on_step = {});

enum class ProtocolPhase { training, deployment };
enum class ControlMode { distributed, centralized };

std::string to_string(ProtocolPhase phase);
std::string to_string(ControlMode mode);

/// Per-time-instant signalling cost.
struct OverheadRecord {
    ProtocolPhase phase = ProtocolPhase::deployment;
    ControlMode mode = ControlMode::distributed;
    std::size_t scalars_up = 0;   ///< real scalars sent towards the controller
    std::size_t scalars_down = 0; ///< real scalars broadcast to the agents
    std::size_t bits_votes = 0;
    std::size_t bits_phases = 0;  ///< phase vectors sent to the surfaces
    std::size_t weight_broadcast_scalars = 0;
};

struct OverheadInputs {
    std::size_t ris_count = 1;
    std::size_t n_tx = 16;
    std::size_t n_ris = 400;
    std::size_t codebook_size = 16;
    std::size_t genome_size = 0; ///< M, broadcast before each training evaluation
};

OverheadRecord message_accounting(const OverheadInputs& in, ProtocolPhase phase,
                                  ControlMode mode = ControlMode::distributed);

} // namespace risne
