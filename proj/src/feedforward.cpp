// SPDX-License-Identifier: Apache-2.0
#include "risne/feedforward.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "risne/mbacnn.hpp"

namespace risne {

std::size_t FeedForwardArch::input_size() const
{
    const std::size_t per_ris = 2 * n_tx * n_ris + 2 * n_ris;
    return (include_direct ? 2 * n_tx : 0) + ris_count * per_ris;
}

void FeedForwardArch::validate() const
{
    if (n_tx < 1 || n_ris < 1 || codebook_size < 1 || ris_count < 1) {
        throw ConfigError("ff: n_tx, n_ris, codebook_size and ris_count must be at least 1");
    }
    for (std::size_t h : hidden) {
        if (h < 1) {
            throw ConfigError("ff.hidden: layer widths must be at least 1");
        }
    }
}

GenomeLayout feedforward_layout(const FeedForwardArch& arch)
{
    arch.validate();
    GenomeLayout layout;
    std::size_t width = arch.input_size();
    for (std::size_t i = 0; i < arch.hidden.size(); ++i) {
        const std::string prefix = "ff." + std::to_string(i);
        layout.add(prefix + ".weight", {arch.hidden[i], width});
        layout.add(prefix + ".bias", {arch.hidden[i]});
        width = arch.hidden[i];
    }
    const std::size_t outputs = arch.phase_outputs() + arch.codebook_size;
    layout.add("ff.out.weight", {outputs, width});
    layout.add("ff.out.bias", {outputs});
    return layout;
}

FeedForwardPolicy::FeedForwardPolicy(FeedForwardArch arch) : arch_(std::move(arch)), layout_(feedforward_layout(arch_))
{
}

PolicyOutput FeedForwardPolicy::forward(std::span<const double> genome, const ChannelSet& cs, std::size_t ris,
                                        Rng& rng, SelectMode mode) const
{
    if (arch_.ris_count != 1) {
        throw InputError("ff: per-RIS forward needs ris_count == 1");
    }
    const std::size_t indices[] = {ris};
    return run(genome, cs, indices, rng, mode);
}

PolicyOutput FeedForwardPolicy::act(std::span<const double> genome, const ChannelSet& cs, Rng& rng,
                                    SelectMode mode) const
{
    if (cs.ris_count() != arch_.ris_count) {
        throw InputError(kind() + ": policy controls " + std::to_string(arch_.ris_count) + " RIS, channel set has " +
                         std::to_string(cs.ris_count()));
    }
    std::vector<std::size_t> indices(arch_.ris_count);
    std::iota(indices.begin(), indices.end(), std::size_t{0});
    return run(genome, cs, indices, rng, mode);
}

PolicyOutput FeedForwardPolicy::run(std::span<const double> genome, const ChannelSet& cs,
                                    std::span<const std::size_t> ris, Rng& rng, SelectMode mode) const
{
    check_genome(genome);
    if (cs.n_tx() != arch_.n_tx) {
        throw InputError("ff: channel dimensions do not match the architecture");
    }
    std::vector<double> x;
    x.reserve(arch_.input_size());
    auto append = [&](const ComplexMatrix& m) {
        const RealMatrix stacked = stack_real_imag(arch_.normalize_inputs ? rms_normalized(m) : m);
        x.insert(x.end(), stacked.data().begin(), stacked.data().end());
    };
    if (arch_.include_direct) {
        append(cs.h);
    }
    for (std::size_t k : ris) {
        if (k >= cs.ris_count() || cs.h1[k].cols() != arch_.n_ris || cs.h2[k].rows() != arch_.n_ris) {
            throw InputError("ff: channel dimensions do not match the architecture");
        }
        append(cs.h1[k]);
        append(cs.h2[k]);
    }

    for (std::size_t i = 0; i < arch_.hidden.size(); ++i) {
        const std::string prefix = "ff." + std::to_string(i);
        x = dense(layout_.matrix(genome, prefix + ".weight"), layout_.slice(genome, prefix + ".bias"), x);
        activate(x, Activation::relu);
    }
    const std::vector<double> y =
        dense(layout_.matrix(genome, "ff.out.weight"), layout_.slice(genome, "ff.out.bias"), x);

    PolicyOutput out;
    for (std::size_t k = 0; k < ris.size(); ++k) {
        PhaseConfig phase;
        phase.values.resize(arch_.n_ris);
        for (std::size_t i = 0; i < arch_.n_ris; ++i) {
            phase.values[i] = std::tanh(y[k * arch_.n_ris + i]) >= 0.0 ? 1 : -1;
        }
        out.phases.push_back(std::move(phase));
    }
    const std::span<const double> logits(y.data() + arch_.phase_outputs(), arch_.codebook_size);
    out.precoder_probs = softmax(logits);
    out.precoder_index = select_index(out.precoder_probs, rng, mode);
    return out;
}

} // namespace risne
