// SPDX-License-Identifier: Apache-2.0
#include "risne/mbacnn.hpp"

#include <cmath>
#include <string>

namespace risne {

void ArchConfig::validate() const
{
    auto fail = [](const std::string& field, const std::string& why) {
        throw ConfigError("arch." + field + ": " + why);
    };
    if (n_tx < 1) {
        fail("n_tx", "must be at least 1");
    }
    if (n_ris < 1) {
        fail("n_ris", "must be at least 1");
    }
    if (codebook_size < 1) {
        fail("codebook_size", "must be at least 1");
    }
    if (kernel_size % 2 == 0) {
        fail("kernel_size", "must be odd, got " + std::to_string(kernel_size));
    }
    if (conv_channels_1 < 1 || conv_channels_2 < 1) {
        fail("conv_channels", "must be at least 1");
    }
    for (std::size_t h : phase_hidden) {
        if (h < 1) {
            fail("phase_hidden", "layer widths must be at least 1");
        }
    }
    if (precoder_hidden < 1) {
        fail("precoder_hidden", "must be at least 1");
    }
    if (phase_states < 2) {
        fail("phase_states", "must be at least 2");
    }
}

GenomeLayout genome_layout(const ArchConfig& arch)
{
    arch.validate();
    const std::size_t d1 = 2 * arch.n_tx;
    const std::size_t d_cat = arch.d_cat();
    const std::size_t k = arch.kernel_size;
    GenomeLayout layout;
    for (const char* w : {"wq", "wk", "wv"}) {
        layout.add(std::string("attn_h1.") + w, {d1, d1});
    }
    for (const char* w : {"wq", "wk", "wv"}) {
        layout.add(std::string("attn_h2.") + w, {2, 2});
    }
    if (arch.direct_branch) {
        for (const char* w : {"wq", "wk", "wv"}) {
            layout.add(std::string("attn_h.") + w, {2, 2});
        }
        layout.add("direct_ff.weight", {d_cat * arch.n_ris, d1});
        layout.add("direct_ff.bias", {d_cat * arch.n_ris});
    }
    layout.add("conv1.kernel", {arch.conv_channels_1, 1, k, k});
    layout.add("conv1.bias", {arch.conv_channels_1});
    layout.add("conv2.kernel", {arch.conv_channels_2, arch.conv_channels_1, k, k});
    layout.add("conv2.bias", {arch.conv_channels_2});
    layout.add("conv3.kernel", {1, arch.conv_channels_2, k, k});
    layout.add("conv3.bias", {1});

    std::size_t width = d_cat;
    for (std::size_t i = 0; i < arch.phase_hidden.size(); ++i) {
        const std::string prefix = "phase." + std::to_string(i);
        layout.add(prefix + ".weight", {arch.phase_hidden[i], width});
        layout.add(prefix + ".bias", {arch.phase_hidden[i]});
        width = arch.phase_hidden[i];
    }
    const std::size_t phase_out = arch.phase_states == 2 ? 1 : static_cast<std::size_t>(arch.phase_states);
    layout.add("phase.out.weight", {phase_out, width});
    layout.add("phase.out.bias", {phase_out});

    layout.add("precoder.hidden.weight", {arch.precoder_hidden, arch.n_ris * d_cat});
    layout.add("precoder.hidden.bias", {arch.precoder_hidden});
    layout.add("precoder.out.weight", {arch.codebook_size, arch.precoder_hidden});
    layout.add("precoder.out.bias", {arch.codebook_size});
    return layout;
}

AttentionResult attention_branch(const RealMatrix& tokens, MatrixView wq, MatrixView wk, MatrixView wv)
{
    const std::size_t d = tokens.cols();
    for (const MatrixView* w : {&wq, &wk, &wv}) {
        if (w->rows != d || w->cols != d) {
            throw InputError("attention_branch: projection must be " + std::to_string(d) + "x" + std::to_string(d));
        }
    }
    require_finite(tokens.data(), "attention_branch");
    const RealMatrix q = matmul(tokens, wq);
    const RealMatrix k = matmul(tokens, wk);
    RealMatrix logits = matmul_transposed(q, k);
    const double inv_scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (double& v : logits.data()) {
        v *= inv_scale;
    }
    AttentionResult result;
    result.scores = softmax_global(logits);
    const RealMatrix p = matmul(tokens, wv);
    result.output = matmul(result.scores, p);
    return result;
}

RealMatrix h1_tokens(const ComplexMatrix& h1)
{
    const std::size_t n_tx = h1.rows();
    RealMatrix tokens(h1.cols(), 2 * n_tx);
    for (std::size_t i = 0; i < h1.cols(); ++i) {
        for (std::size_t n = 0; n < n_tx; ++n) {
            tokens(i, n) = h1(n, i).real();
            tokens(i, n_tx + n) = h1(n, i).imag();
        }
    }
    return tokens;
}

RealMatrix pair_tokens(const ComplexMatrix& v)
{
    if (v.cols() != 1) {
        throw InputError("pair_tokens: expected a column vector");
    }
    RealMatrix tokens(v.rows(), 2);
    for (std::size_t i = 0; i < v.rows(); ++i) {
        tokens(i, 0) = v(i, 0).real();
        tokens(i, 1) = v(i, 0).imag();
    }
    return tokens;
}

RealMatrix merge_branches(const RealMatrix& a1, const RealMatrix& a2, const RealMatrix* direct_attended,
                          const DenseWeights* direct_ff)
{
    if (a1.rows() != a2.rows()) {
        throw InputError("merge_branches: branch row counts differ");
    }
    const std::size_t n = a1.rows();
    const std::size_t d_cat = a1.cols() + a2.cols();
    RealMatrix concat(n, d_cat);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < a1.cols(); ++c) {
            concat(r, c) = a1(r, c);
        }
        for (std::size_t c = 0; c < a2.cols(); ++c) {
            concat(r, a1.cols() + c) = a2(r, c);
        }
    }
    RealMatrix merged = layer_norm(concat);
    if (direct_attended == nullptr) {
        return merged;
    }
    if (direct_ff == nullptr) {
        throw InputError("merge_branches: direct branch given without its feed-forward weights");
    }
    if (direct_ff->weight.rows != n * d_cat) {
        throw InputError("merge_branches: direct feed-forward output must be N_RIS * d_cat");
    }
    std::vector<double> lifted = dense(direct_ff->weight, direct_ff->bias, direct_attended->data());
    const RealMatrix direct = layer_norm(RealMatrix(n, d_cat, std::move(lifted)));
    for (std::size_t i = 0; i < merged.size(); ++i) {
        merged[i] += direct[i];
    }
    return merged;
}

RealMatrix cnn_forward(const RealMatrix& a_t, std::span<const ConvLayerWeights> layers, Activation activation)
{
    if (layers.empty() || layers.back().kernels.out_channels != 1) {
        throw InputError("cnn_forward: the last layer must output a single channel");
    }
    Tensor3 x(1, a_t.rows(), a_t.cols());
    x.data.assign(a_t.data().begin(), a_t.data().end());
    for (std::size_t i = 0; i < layers.size(); ++i) {
        x = conv2d_same(x, layers[i].kernels, layers[i].bias);
        if (i + 1 < layers.size()) {
            activate(x.data, activation);
        }
    }
    return RealMatrix(a_t.rows(), a_t.cols(), std::move(x.data));
}

PhaseConfig phase_head(const RealMatrix& features, std::span<const DenseWeights> layers, int states)
{
    if (layers.empty()) {
        throw InputError("phase_head: no layers");
    }
    PhaseConfig phases;
    phases.states = states;
    phases.values.resize(features.rows());
    for (std::size_t r = 0; r < features.rows(); ++r) {
        std::vector<double> x(features.row(r).begin(), features.row(r).end());
        for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
            x = dense(layers[l].weight, layers[l].bias, x);
            activate(x, Activation::tanh);
        }
        x = dense(layers.back().weight, layers.back().bias, x);
        if (states == 2) {
            const double out = std::tanh(x.at(0));
            phases.values[r] = out >= 0.0 ? 1 : -1;
        } else {
            phases.values[r] = static_cast<int>(argmax(softmax(x)));
        }
    }
    return phases;
}

PrecoderChoice precoder_head(const RealMatrix& features, const DenseWeights& hidden, const DenseWeights& out,
                             Rng& rng, SelectMode mode)
{
    std::vector<double> h = dense(hidden.weight, hidden.bias, features.data());
    activate(h, Activation::relu);
    const std::vector<double> logits = dense(out.weight, out.bias, h);
    PrecoderChoice choice;
    choice.probs = softmax(logits);
    choice.index = select_index(choice.probs, rng, mode);
    return choice;
}

Mbacnn::Mbacnn(ArchConfig arch) : arch_(std::move(arch)), layout_(genome_layout(arch_)) {}

std::vector<ConvLayerWeights> Mbacnn::conv_weights(std::span<const double> genome) const
{
    const std::size_t k = arch_.kernel_size;
    const std::size_t channels[] = {1, arch_.conv_channels_1, arch_.conv_channels_2, 1};
    std::vector<ConvLayerWeights> layers;
    for (std::size_t i = 0; i < 3; ++i) {
        const std::string prefix = "conv" + std::to_string(i + 1);
        ConvKernelView kernels{layout_.slice(genome, prefix + ".kernel"), channels[i + 1], channels[i], k};
        layers.push_back({kernels, layout_.slice(genome, prefix + ".bias")});
    }
    return layers;
}

std::vector<DenseWeights> Mbacnn::phase_weights(std::span<const double> genome) const
{
    std::vector<DenseWeights> layers;
    for (std::size_t i = 0; i < arch_.phase_hidden.size(); ++i) {
        const std::string prefix = "phase." + std::to_string(i);
        layers.push_back({layout_.matrix(genome, prefix + ".weight"), layout_.slice(genome, prefix + ".bias")});
    }
    layers.push_back({layout_.matrix(genome, "phase.out.weight"), layout_.slice(genome, "phase.out.bias")});
    return layers;
}

MbacnnTrace Mbacnn::forward_trace(std::span<const double> genome, const ChannelSet& cs, std::size_t ris, Rng& rng,
                                  SelectMode mode) const
{
    check_genome(genome);
    if (ris >= cs.ris_count()) {
        throw InputError("mbacnn: RIS index out of range");
    }
    if (cs.n_tx() != arch_.n_tx || cs.h1[ris].rows() != arch_.n_tx || cs.h1[ris].cols() != arch_.n_ris ||
        cs.h2[ris].rows() != arch_.n_ris) {
        throw InputError("mbacnn: channel dimensions do not match the architecture");
    }
    const bool scale = arch_.normalize_inputs;
    const ComplexMatrix h1 = scale ? rms_normalized(cs.h1[ris]) : cs.h1[ris];
    const ComplexMatrix h2 = scale ? rms_normalized(cs.h2[ris]) : cs.h2[ris];
    auto view = [&](const std::string& name) { return layout_.matrix(genome, name); };

    MbacnnTrace trace;
    trace.h1_branch =
        attention_branch(h1_tokens(h1), view("attn_h1.wq"), view("attn_h1.wk"), view("attn_h1.wv"));
    trace.h2_branch =
        attention_branch(pair_tokens(h2), view("attn_h2.wq"), view("attn_h2.wk"), view("attn_h2.wv"));
    if (arch_.direct_branch) {
        const ComplexMatrix h = scale ? rms_normalized(cs.h) : cs.h;
        trace.direct_branch = attention_branch(pair_tokens(h), view("attn_h.wq"), view("attn_h.wk"), view("attn_h.wv"));
        const DenseWeights ff{view("direct_ff.weight"), layout_.slice(genome, "direct_ff.bias")};
        trace.merged =
            merge_branches(trace.h1_branch.output, trace.h2_branch.output, &trace.direct_branch.output, &ff);
    } else {
        trace.merged = merge_branches(trace.h1_branch.output, trace.h2_branch.output);
    }
    const auto conv = conv_weights(genome);
    trace.features = cnn_forward(trace.merged, conv, arch_.conv_activation);

    const auto phase_layers = phase_weights(genome);
    trace.output.phases.push_back(phase_head(trace.features, phase_layers, arch_.phase_states));

    const DenseWeights hidden{view("precoder.hidden.weight"), layout_.slice(genome, "precoder.hidden.bias")};
    const DenseWeights out{view("precoder.out.weight"), layout_.slice(genome, "precoder.out.bias")};
    PrecoderChoice choice = precoder_head(trace.features, hidden, out, rng, mode);
    trace.output.precoder_index = choice.index;
    trace.output.precoder_probs = std::move(choice.probs);
    return trace;
}

PolicyOutput Mbacnn::forward(std::span<const double> genome, const ChannelSet& cs, std::size_t ris, Rng& rng,
                             SelectMode mode) const
{
    return forward_trace(genome, cs, ris, rng, mode).output;
}

} // namespace risne
