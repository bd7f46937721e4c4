// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "risne/channel.hpp"
#include "risne/numerics.hpp"
#include "risne/policy.hpp"

namespace risne {

/// Multi-branch attention + CNN policy architecture.
struct ArchConfig {
    std::size_t n_tx = 16;
    std::size_t n_ris = 400;
    std::size_t codebook_size = 16;

    std::size_t kernel_size = 3;
    std::size_t conv_channels_1 = 8;
    std::size_t conv_channels_2 = 8;
    Activation conv_activation = Activation::tanh;

    std::vector<std::size_t> phase_hidden{16};
    std::size_t precoder_hidden = 64;

    bool direct_branch = false;
    int phase_states = 2;
    bool normalize_inputs = true; ///< RMS-normalize each channel before tokenizing

    /// Token width after concatenating the H1 and h2 branches: 2 N_TX + 2.
    std::size_t d_cat() const { return 2 * n_tx + 2; }

    void validate() const;

    bool operator==(const ArchConfig&) const = default;
};

GenomeLayout genome_layout(const ArchConfig& arch);

struct AttentionResult {
    RealMatrix scores; ///< n x n, sums to one over all entries
    RealMatrix output; ///< n x d
};

/// Single-head self-attention with a softmax over the whole score matrix,
/// scaled by sqrt(d).
AttentionResult attention_branch(const RealMatrix& tokens, MatrixView wq, MatrixView wk, MatrixView wv);

/// N_RIS x 2N_TX tokens: one row per RIS element, real parts then imaginary parts.
RealMatrix h1_tokens(const ComplexMatrix& h1);

/// n x 2 tokens (real, imag) for a complex column vector.
RealMatrix pair_tokens(const ComplexMatrix& v);

struct DenseWeights {
    MatrixView weight;
    std::span<const double> bias;
};

struct ConvLayerWeights {
    ConvKernelView kernels;
    std::span<const double> bias;
};

/// layer_norm(colcat(A1, A2)) [+ layer_norm(reshape(W a + b))] where a is the
/// flattened direct-link attention output.
RealMatrix merge_branches(const RealMatrix& a1, const RealMatrix& a2, const RealMatrix* direct_attended = nullptr,
                          const DenseWeights* direct_ff = nullptr);

/// Three same-padded convolutions over a 1 x N_RIS x d_cat image; activation
/// between layers, linear output, single output channel squeezed back.
RealMatrix cnn_forward(const RealMatrix& a_t, std::span<const ConvLayerWeights> layers, Activation activation);

/// Shared per-row MLP. Binary mode: tanh throughout and sign (0 -> +1).
/// Multi-state mode: tanh hidden layers, softmax output, argmax index.
PhaseConfig phase_head(const RealMatrix& features, std::span<const DenseWeights> layers, int states = 2);

struct PrecoderChoice {
    std::size_t index = 0;
    std::vector<double> probs;
};

/// Flattened features -> ReLU hidden layer -> softmax over codebook entries.
PrecoderChoice precoder_head(const RealMatrix& features, const DenseWeights& hidden, const DenseWeights& out,
                             Rng& rng, SelectMode mode);

/// Intermediate tensors of one forward pass; used by tests and diagnostics.
struct MbacnnTrace {
    AttentionResult h1_branch;
    AttentionResult h2_branch;
    AttentionResult direct_branch; ///< empty when the direct branch is disabled
    RealMatrix merged;
    RealMatrix features;
    PolicyOutput output;
};

class Mbacnn : public RisAgentPolicy {
public:
    explicit Mbacnn(ArchConfig arch);

    std::string kind() const override { return "mbacnn"; }
    const GenomeLayout& layout() const override { return layout_; }
    const ArchConfig& arch() const { return arch_; }

    PolicyOutput forward(std::span<const double> genome, const ChannelSet& cs, std::size_t ris, Rng& rng,
                         SelectMode mode) const override;

    MbacnnTrace forward_trace(std::span<const double> genome, const ChannelSet& cs, std::size_t ris, Rng& rng,
                              SelectMode mode) const;

    std::vector<ConvLayerWeights> conv_weights(std::span<const double> genome) const;
    std::vector<DenseWeights> phase_weights(std::span<const double> genome) const;

private:
    ArchConfig arch_;
    GenomeLayout layout_;
};

} // namespace risne
