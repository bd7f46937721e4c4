// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "risne/errors.hpp"

namespace risne {

using Complex = std::complex<double>;

/// Dense row-major matrix.
template <class T>
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill)
    {
    }

    Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
        : rows_(rows), cols_(cols), data_(std::move(data))
    {
        if (data_.size() != rows_ * cols_) {
            throw InputError("Matrix: " + std::to_string(data_.size()) + " entries given for a " +
                             std::to_string(rows_) + "x" + std::to_string(cols_) + " matrix");
        }
    }

    static Matrix from_rows(std::initializer_list<std::initializer_list<T>> rows)
    {
        const std::size_t r = rows.size();
        const std::size_t c = r == 0 ? 0 : rows.begin()->size();
        std::vector<T> data;
        data.reserve(r * c);
        for (const auto& row : rows) {
            if (row.size() != c) {
                throw InputError("Matrix::from_rows: ragged rows");
            }
            data.insert(data.end(), row.begin(), row.end());
        }
        return Matrix(r, c, std::move(data));
    }

    static Matrix column(std::initializer_list<T> values)
    {
        return Matrix(values.size(), 1, std::vector<T>(values));
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    /// Flat access (row-major).
    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    std::span<T> data() { return data_; }
    std::span<const T> data() const { return data_; }
    const std::vector<T>& values() const { return data_; }

    std::span<T> row(std::size_t r) { return std::span<T>(data_).subspan(r * cols_, cols_); }
    std::span<const T> row(std::size_t r) const
    {
        return std::span<const T>(data_).subspan(r * cols_, cols_);
    }

    Matrix transpose() const
    {
        Matrix out(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t c = 0; c < cols_; ++c) {
                out(c, r) = (*this)(r, c);
            }
        }
        return out;
    }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using RealMatrix = Matrix<double>;
using ComplexMatrix = Matrix<Complex>;

/// Non-owning read-only view of a row-major real matrix. Used to read network
/// weights straight out of a genome without copying.
struct MatrixView {
    std::span<const double> data;
    std::size_t rows = 0;
    std::size_t cols = 0;

    MatrixView() = default;
    MatrixView(std::span<const double> d, std::size_t r, std::size_t c);
    MatrixView(const RealMatrix& m) : data(m.data()), rows(m.rows()), cols(m.cols()) {} // NOLINT

    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    std::span<const double> row(std::size_t r) const { return data.subspan(r * cols, cols); }
};

/// C x H x W real tensor, row-major with channel outermost.
struct Tensor3 {
    std::size_t channels = 0;
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<double> data;

    Tensor3() = default;
    Tensor3(std::size_t c, std::size_t h, std::size_t w, double fill = 0.0)
        : channels(c), height(h), width(w), data(c * h * w, fill)
    {
    }

    double& at(std::size_t c, std::size_t y, std::size_t x) { return data[(c * height + y) * width + x]; }
    double at(std::size_t c, std::size_t y, std::size_t x) const { return data[(c * height + y) * width + x]; }
};

/// Convolution kernels laid out as C_out x C_in x k x k.
struct ConvKernelView {
    std::span<const double> data;
    std::size_t out_channels = 0;
    std::size_t in_channels = 0;
    std::size_t size = 0;

    double operator()(std::size_t o, std::size_t i, std::size_t ky, std::size_t kx) const
    {
        return data[((o * in_channels + i) * size + ky) * size + kx];
    }
};

inline constexpr double kLayerNormEpsilon = 1e-5;

enum class Activation { tanh, relu, identity };

// --- complex linear algebra ---------------------------------------------------

ComplexMatrix cplx_matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix conj_transpose(const ComplexMatrix& a);

// --- real kernels -------------------------------------------------------------

RealMatrix matmul(MatrixView a, MatrixView b);

/// a * b^T without materializing the transpose.
RealMatrix matmul_transposed(MatrixView a, MatrixView b);

/// Softmax over every entry of the matrix at once (not row-wise).
RealMatrix softmax_global(const RealMatrix& m);

/// Softmax of a flat vector, max-subtracted.
std::vector<double> softmax(std::span<const double> logits);

/// Row-wise normalization to zero mean / unit variance, no affine parameters.
RealMatrix layer_norm(const RealMatrix& m, double epsilon = kLayerNormEpsilon);

/// Zero-padded "same" cross-correlation (no kernel flip).
Tensor3 conv2d_same(const Tensor3& input, const ConvKernelView& kernels, std::span<const double> bias);

/// y = W x + b, W is out x in.
std::vector<double> dense(MatrixView weight, std::span<const double> bias, std::span<const double> x);

void activate(std::span<double> values, Activation act);

/// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> values);

void require_finite(std::span<const double> values, const char* what);

} // namespace risne
