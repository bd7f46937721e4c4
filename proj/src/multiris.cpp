// SPDX-License-Identifier: Apache-2.0
#include "risne/multiris.hpp"

#include <bit>

namespace risne {

void AggregatorConfig::validate() const
{
    if (!bypass && hidden < 1) {
        throw ConfigError("aggregator.hidden: must be at least 1");
    }
}

std::string to_string(VoteEncoding encoding)
{
    return encoding == VoteEncoding::one_hot ? "one_hot" : "raw_index";
}

VoteEncoding vote_encoding_from_string(const std::string& name)
{
    if (name == "one_hot") {
        return VoteEncoding::one_hot;
    }
    if (name == "raw_index") {
        return VoteEncoding::raw_index;
    }
    throw ConfigError("aggregator.encoding: expected one_hot or raw_index, got '" + name + "'");
}

std::vector<double> encode_votes(std::span<const std::size_t> votes, std::size_t codebook_size, VoteEncoding encoding)
{
    for (std::size_t v : votes) {
        if (v >= codebook_size) {
            throw InputError("encode_votes: vote " + std::to_string(v) + " outside codebook of size " +
                             std::to_string(codebook_size));
        }
    }
    if (encoding == VoteEncoding::raw_index) {
        return {votes.begin(), votes.end()};
    }
    std::vector<double> x(votes.size() * codebook_size, 0.0);
    for (std::size_t k = 0; k < votes.size(); ++k) {
        x[k * codebook_size + votes[k]] = 1.0;
    }
    return x;
}

GenomeLayout aggregator_layout(const AggregatorConfig& cfg, std::size_t ris_count, std::size_t codebook_size)
{
    cfg.validate();
    GenomeLayout layout;
    if (cfg.bypass) {
        return layout;
    }
    const std::size_t inputs = cfg.encoding == VoteEncoding::one_hot ? ris_count * codebook_size : ris_count;
    layout.add("aggregator.hidden.weight", {cfg.hidden, inputs});
    layout.add("aggregator.hidden.bias", {cfg.hidden});
    layout.add("aggregator.out.weight", {codebook_size, cfg.hidden});
    layout.add("aggregator.out.bias", {codebook_size});
    return layout;
}

AgentDecision agent_act(const RisAgentPolicy& agent, std::span<const double> agent_genome, const ChannelSet& cs,
                        std::size_t k, Rng& rng)
{
    if (agent_genome.size() != agent.layout().total()) {
        throw InputError("agent_act: genome has " + std::to_string(agent_genome.size()) +
                         " entries, agent layout expects " + std::to_string(agent.layout().total()));
    }
    PolicyOutput out = agent.forward(agent_genome, cs, k, rng, SelectMode::argmax);
    return {std::move(out.phases.front()), out.precoder_index, std::move(out.precoder_probs)};
}

PrecoderChoice aggregate_precoder(const GenomeLayout& layout, std::span<const double> aggregator_genome,
                                  std::span<const std::size_t> votes, std::size_t codebook_size,
                                  VoteEncoding encoding, Rng& rng, SelectMode mode)
{
    if (aggregator_genome.size() != layout.total()) {
        throw InputError("aggregate_precoder: aggregator genome has wrong length");
    }
    const std::vector<double> x = encode_votes(votes, codebook_size, encoding);
    std::vector<double> h = dense(layout.matrix(aggregator_genome, "aggregator.hidden.weight"),
                                  layout.slice(aggregator_genome, "aggregator.hidden.bias"), x);
    activate(h, Activation::relu);
    const std::vector<double> logits = dense(layout.matrix(aggregator_genome, "aggregator.out.weight"),
                                             layout.slice(aggregator_genome, "aggregator.out.bias"), h);
    PrecoderChoice choice;
    choice.probs = softmax(logits);
    choice.index = select_index(choice.probs, rng, mode);
    return choice;
}

MultiRisPolicy::MultiRisPolicy(std::shared_ptr<const RisAgentPolicy> agent, AggregatorConfig cfg,
                               std::size_t ris_count, std::size_t codebook_size)
    : agent_(std::move(agent)), cfg_(cfg), ris_count_(ris_count), codebook_size_(codebook_size)
{
    if (!agent_) {
        throw InputError("MultiRisPolicy: no agent network");
    }
    if (ris_count_ < 1) {
        throw InputError("MultiRisPolicy: K must be at least 1");
    }
    agent_size_ = agent_->layout().total();
    aggregator_layout_ = aggregator_layout(cfg_, ris_count_, codebook_size_);
    for (const Segment& s : agent_->layout().segments()) {
        layout_.add("agent." + s.name, s.shape);
    }
    for (const Segment& s : aggregator_layout_.segments()) {
        layout_.add(s.name, s.shape);
    }
}

std::span<const double> MultiRisPolicy::agent_genome(std::span<const double> genome) const
{
    return genome.subspan(0, agent_size_);
}

std::span<const double> MultiRisPolicy::aggregator_genome(std::span<const double> genome) const
{
    return genome.subspan(agent_size_);
}

PolicyOutput MultiRisPolicy::act(std::span<const double> genome, const ChannelSet& cs, Rng& rng,
                                 SelectMode mode) const
{
    check_genome(genome);
    if (cs.ris_count() != ris_count_) {
        throw InputError("MultiRisPolicy: channel set has " + std::to_string(cs.ris_count()) +
                         " surfaces, policy expects " + std::to_string(ris_count_));
    }
    const auto agent_w = agent_genome(genome);
    PolicyOutput out;
    std::vector<std::size_t> votes(ris_count_);
    for (std::size_t k = 0; k < ris_count_; ++k) {
        if (cfg_.bypass) {
            PolicyOutput local = agent_->forward(agent_w, cs, k, rng, mode);
            out.phases.push_back(std::move(local.phases.front()));
            votes[k] = local.precoder_index;
        } else {
            AgentDecision d = agent_act(*agent_, agent_w, cs, k, rng);
            out.phases.push_back(std::move(d.phases));
            votes[k] = d.vote;
        }
    }

    if (cfg_.bypass) {
        std::vector<double> counts(codebook_size_, 0.0);
        for (std::size_t v : votes) {
            counts.at(v) += 1.0;
        }
        out.precoder_index = argmax(counts);
        for (double& c : counts) {
            c /= static_cast<double>(ris_count_);
        }
        out.precoder_probs = std::move(counts);
        return out;
    }
    PrecoderChoice choice = aggregate_precoder(aggregator_layout_, aggregator_genome(genome), votes, codebook_size_,
                                               cfg_.encoding, rng, mode);
    out.precoder_index = choice.index;
    out.precoder_probs = std::move(choice.probs);
    return out;
}

double evaluate_fitness_multi(const MultiRisPolicy& policy, std::span<const double> genome,
                              const EvaluationContext& ctx, std::span<const std::uint64_t> episode_seeds,
                              const StepObserver& on_step)
{
    return evaluate_fitness(policy, genome, ctx, episode_seeds, on_step);
}

std::string to_string(ProtocolPhase phase)
{
    return phase == ProtocolPhase::training ? "training" : "deployment";
}

std::string to_string(ControlMode mode)
{
    return mode == ControlMode::distributed ? "distributed" : "centralized";
}

OverheadRecord message_accounting(const OverheadInputs& in, ProtocolPhase phase, ControlMode mode)
{
    OverheadRecord r;
    r.phase = phase;
    r.mode = mode;
    if (mode == ControlMode::distributed) {
        const std::size_t bits_per_vote =
            in.codebook_size <= 1 ? 0 : static_cast<std::size_t>(std::bit_width(in.codebook_size - 1));
        r.bits_votes = in.ris_count * bits_per_vote;
        r.scalars_down = 2 * in.n_tx;
    } else {
        r.scalars_up = 2 * in.n_tx * in.n_ris * in.ris_count + 2 * in.n_ris * in.ris_count + 2 * in.n_tx;
        r.bits_phases = in.ris_count * in.n_ris;
    }
    if (phase == ProtocolPhase::training) {
        r.weight_broadcast_scalars = in.genome_size;
    }
    return r;
}

} // namespace risne
