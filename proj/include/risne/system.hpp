// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "risne/channel.hpp"
#include "risne/numerics.hpp"

namespace risne {

/// Phase symbols for one RIS. With states == 2 the entries are the binary
/// symbols -1 / +1; with states > 2 they are indices 0..states-1.
struct PhaseConfig {
    std::vector<int> values;
    int states = 2;

    std::size_t size() const { return values.size(); }
    bool binary() const { return states == 2; }

    /// Throws InputError if any entry is outside the admissible set.
    void validate() const;

    bool operator==(const PhaseConfig&) const = default;
};

/// Binary: -1 -> +1 (phase 0), +1 -> -1 (phase pi). Multi-state: s -> exp(j 2 pi s / S).
Complex phase_to_coefficient(int symbol, int states = 2);

/// DFT precoder codebook; vector i is column i of the normalized DFT matrix.
class Codebook {
public:
    Codebook() = default;
    explicit Codebook(ComplexMatrix columns) : columns_(std::move(columns)) {}

    std::size_t size() const { return columns_.cols(); }
    std::size_t dimension() const { return columns_.rows(); }
    ComplexMatrix vector(std::size_t index) const;
    const ComplexMatrix& matrix() const { return columns_; }

private:
    ComplexMatrix columns_;
};

Codebook dft_codebook(std::size_t n_tx);

double dbm_to_watts(double dbm);

struct LinkBudget {
    double tx_power_w = 1.0;
    double noise_power_w = 1.0;

    static LinkBudget from_dbm(double tx_power_dbm, double noise_dbm);
    static LinkBudget from_scenario(const ScenarioConfig& cfg);

    double snr_scale() const { return tx_power_w / noise_power_w; }
};

/// m = h^H + sum_k h2_k^H Phi_k H1_k^H as a 1 x N_TX row.
ComplexMatrix effective_channel(const ChannelSet& cs, std::span<const PhaseConfig> phases);

/// gamma = P / sigma^2 |m v|^2.
double snr(const ChannelSet& cs, std::span<const PhaseConfig> phases, const ComplexMatrix& v,
           const LinkBudget& budget);

/// log2(1 + gamma).
double rate(double gamma);

inline double to_db(double linear)
{
    return 10.0 * std::log10(linear);
}

/// For a fixed precoder v the received amplitude is affine in the per-element
/// reflection coefficients: m v = direct + sum_i c_i * term_i. Search baselines
/// use this to score candidates in O(N) instead of O(N * N_TX).
struct ElementTerms {
    Complex direct;
    std::vector<Complex> terms; ///< K * N_RIS entries, RIS-major
    double scale = 1.0;         ///< P / sigma^2

    ElementTerms(const ChannelSet& cs, const ComplexMatrix& v, const LinkBudget& budget);

    /// coefficients has one entry per element across all RIS.
    double gamma(std::span<const Complex> coefficients) const;
};

} // namespace risne
