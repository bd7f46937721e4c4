// SPDX-License-Identifier: Apache-2.0
#include "risne/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace risne {

MatrixView::MatrixView(std::span<const double> d, std::size_t r, std::size_t c) : data(d), rows(r), cols(c)
{
    if (d.size() != r * c) {
        throw InputError("MatrixView: span of " + std::to_string(d.size()) + " for " + std::to_string(r) + "x" +
                         std::to_string(c));
    }
}

ComplexMatrix cplx_matmul(const ComplexMatrix& a, const ComplexMatrix& b)
{
    if (a.cols() != b.rows()) {
        throw InputError("cplx_matmul: inner dimensions " + std::to_string(a.cols()) + " and " +
                         std::to_string(b.rows()) + " differ");
    }
    ComplexMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Complex aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    return out;
}

ComplexMatrix conj_transpose(const ComplexMatrix& a)
{
    ComplexMatrix out(a.cols(), a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) {
            out(c, r) = std::conj(a(r, c));
        }
    }
    return out;
}

RealMatrix matmul(MatrixView a, MatrixView b)
{
    if (a.cols != b.rows) {
        throw InputError("matmul: inner dimensions " + std::to_string(a.cols) + " and " + std::to_string(b.rows) +
                         " differ");
    }
    RealMatrix out(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        auto out_row = out.row(i);
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = a(i, k);
            const auto b_row = b.row(k);
            for (std::size_t j = 0; j < b.cols; ++j) {
                out_row[j] += aik * b_row[j];
            }
        }
    }
    return out;
}

RealMatrix matmul_transposed(MatrixView a, MatrixView b)
{
    if (a.cols != b.cols) {
        throw InputError("matmul_transposed: widths " + std::to_string(a.cols) + " and " + std::to_string(b.cols) +
                         " differ");
    }
    RealMatrix out(a.rows, b.rows);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const auto a_row = a.row(i);
        for (std::size_t j = 0; j < b.rows; ++j) {
            const auto b_row = b.row(j);
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols; ++k) {
                acc += a_row[k] * b_row[k];
            }
            out(i, j) = acc;
        }
    }
    return out;
}

void require_finite(std::span<const double> values, const char* what)
{
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw InputError(std::string(what) + ": non-finite input");
        }
    }
}

std::vector<double> softmax(std::span<const double> logits)
{
    require_finite(logits, "softmax");
    std::vector<double> out(logits.begin(), logits.end());
    if (out.empty()) {
        return out;
    }
    const double peak = *std::max_element(out.begin(), out.end());
    double total = 0.0;
    for (double& v : out) {
        v = std::exp(v - peak);
        total += v;
    }
    for (double& v : out) {
        v /= total;
    }
    return out;
}

RealMatrix softmax_global(const RealMatrix& m)
{
    return RealMatrix(m.rows(), m.cols(), softmax(m.data()));
}

RealMatrix layer_norm(const RealMatrix& m, double epsilon)
{
    require_finite(m.data(), "layer_norm");
    RealMatrix out(m.rows(), m.cols());
    const double n = static_cast<double>(m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto in_row = m.row(r);
        double mean = 0.0;
        for (double v : in_row) {
            mean += v;
        }
        mean /= n;
        double var = 0.0;
        for (double v : in_row) {
            var += (v - mean) * (v - mean);
        }
        var /= n;
        const double inv = 1.0 / std::sqrt(var + epsilon);
        auto out_row = out.row(r);
        for (std::size_t c = 0; c < in_row.size(); ++c) {
            out_row[c] = (in_row[c] - mean) * inv;
        }
    }
    return out;
}

Tensor3 conv2d_same(const Tensor3& input, const ConvKernelView& kernels, std::span<const double> bias)
{
    if (kernels.size % 2 == 0) {
        throw ConfigError("conv2d_same: kernel size must be odd, got " + std::to_string(kernels.size));
    }
    if (kernels.in_channels != input.channels) {
        throw InputError("conv2d_same: kernel expects " + std::to_string(kernels.in_channels) +
                         " input channels, tensor has " + std::to_string(input.channels));
    }
    if (bias.size() != kernels.out_channels ||
        kernels.data.size() != kernels.out_channels * kernels.in_channels * kernels.size * kernels.size) {
        throw InputError("conv2d_same: kernel/bias sizes inconsistent");
    }
    const auto pad = static_cast<std::ptrdiff_t>(kernels.size / 2);
    const auto height = static_cast<std::ptrdiff_t>(input.height);
    const auto width = static_cast<std::ptrdiff_t>(input.width);
    const auto k = static_cast<std::ptrdiff_t>(kernels.size);

    Tensor3 out(kernels.out_channels, input.height, input.width);
    for (std::size_t o = 0; o < kernels.out_channels; ++o) {
        for (std::ptrdiff_t y = 0; y < height; ++y) {
            for (std::ptrdiff_t x = 0; x < width; ++x) {
                double acc = bias[o];
                for (std::size_t i = 0; i < input.channels; ++i) {
                    for (std::ptrdiff_t ky = 0; ky < k; ++ky) {
                        const std::ptrdiff_t sy = y + ky - pad;
                        if (sy < 0 || sy >= height) {
                            continue;
                        }
                        for (std::ptrdiff_t kx = 0; kx < k; ++kx) {
                            const std::ptrdiff_t sx = x + kx - pad;
                            if (sx < 0 || sx >= width) {
                                continue;
                            }
                            acc += kernels(o, i, static_cast<std::size_t>(ky), static_cast<std::size_t>(kx)) *
                                   input.at(i, static_cast<std::size_t>(sy), static_cast<std::size_t>(sx));
                        }
                    }
                }
                out.at(o, static_cast<std::size_t>(y), static_cast<std::size_t>(x)) = acc;
            }
        }
    }
    return out;
}

std::vector<double> dense(MatrixView weight, std::span<const double> bias, std::span<const double> x)
{
    if (weight.cols != x.size() || bias.size() != weight.rows) {
        throw InputError("dense: weight " + std::to_string(weight.rows) + "x" + std::to_string(weight.cols) +
                         ", bias " + std::to_string(bias.size()) + ", input " + std::to_string(x.size()));
    }
    std::vector<double> y(bias.begin(), bias.end());
    for (std::size_t r = 0; r < weight.rows; ++r) {
        const auto w_row = weight.row(r);
        double acc = 0.0;
        for (std::size_t c = 0; c < x.size(); ++c) {
            acc += w_row[c] * x[c];
        }
        y[r] += acc;
    }
    return y;
}

void activate(std::span<double> values, Activation act)
{
    switch (act) {
    case Activation::tanh:
        for (double& v : values) {
            v = std::tanh(v);
        }
        break;
    case Activation::relu:
        for (double& v : values) {
            v = v > 0.0 ? v : 0.0;
        }
        break;
    case Activation::identity:
        break;
    }
}

std::size_t argmax(std::span<const double> values)
{
    if (values.empty()) {
        throw InputError("argmax: empty input");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) {
            best = i;
        }
    }
    return best;
}

} // namespace risne
