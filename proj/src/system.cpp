// SPDX-License-Identifier: Apache-2.0
#include "risne/system.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace risne {

void PhaseConfig::validate() const
{
    if (states < 2) {
        throw InputError("PhaseConfig: at least two phase states are required");
    }
    for (int v : values) {
        const bool ok = binary() ? (v == -1 || v == 1) : (v >= 0 && v < states);
        if (!ok) {
            throw InputError("PhaseConfig: inadmissible symbol " + std::to_string(v));
        }
    }
}

Complex phase_to_coefficient(int symbol, int states)
{
    if (states == 2) {
        if (symbol == -1) {
            return {1.0, 0.0};
        }
        if (symbol == 1) {
            return {-1.0, 0.0};
        }
        throw InputError("phase_to_coefficient: binary symbol must be -1 or +1, got " + std::to_string(symbol));
    }
    if (states < 2 || symbol < 0 || symbol >= states) {
        throw InputError("phase_to_coefficient: index " + std::to_string(symbol) + " outside 0.." +
                         std::to_string(states - 1));
    }
    // Exact values on the axes keep quarter turns free of rounding noise.
    if ((4 * symbol) % states == 0) {
        switch ((4 * symbol / states) % 4) {
        case 0:
            return {1.0, 0.0};
        case 1:
            return {0.0, 1.0};
        case 2:
            return {-1.0, 0.0};
        default:
            return {0.0, -1.0};
        }
    }
    return std::polar(1.0, 2.0 * std::numbers::pi * symbol / states);
}

ComplexMatrix Codebook::vector(std::size_t index) const
{
    if (index >= size()) {
        throw InputError("Codebook::vector: index " + std::to_string(index) + " out of range");
    }
    ComplexMatrix v(dimension(), 1);
    for (std::size_t n = 0; n < dimension(); ++n) {
        v(n, 0) = columns_(n, index);
    }
    return v;
}

Codebook dft_codebook(std::size_t n_tx)
{
    if (n_tx < 1) {
        throw InputError("dft_codebook: n_tx must be at least 1");
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_tx));
    ComplexMatrix columns(n_tx, n_tx);
    for (std::size_t n = 0; n < n_tx; ++n) {
        for (std::size_t m = 0; m < n_tx; ++m) {
            // Reduce the exponent mod N so that exact roots of unity stay exact.
            const std::size_t k = (n * m) % n_tx;
            Complex root;
            if ((4 * k) % n_tx == 0) {
                const Complex axis[] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
                root = axis[(4 * k / n_tx) % 4];
            } else {
                root = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_tx));
            }
            columns(n, m) = scale * root;
        }
    }
    return Codebook(std::move(columns));
}

double dbm_to_watts(double dbm)
{
    return std::pow(10.0, (dbm - 30.0) / 10.0);
}

LinkBudget LinkBudget::from_dbm(double tx_power_dbm, double noise_dbm)
{
    return {dbm_to_watts(tx_power_dbm), dbm_to_watts(noise_dbm)};
}

LinkBudget LinkBudget::from_scenario(const ScenarioConfig& cfg)
{
    return from_dbm(cfg.tx_power_dbm, cfg.noise_dbm);
}

ComplexMatrix effective_channel(const ChannelSet& cs, std::span<const PhaseConfig> phases)
{
    const std::size_t n_tx = cs.n_tx();
    if (cs.h.cols() != 1 || phases.size() != cs.ris_count()) {
        throw InputError("effective_channel: need one phase configuration per RIS");
    }
    ComplexMatrix m(1, n_tx);
    for (std::size_t n = 0; n < n_tx; ++n) {
        m(0, n) = std::conj(cs.h(n, 0));
    }
    for (std::size_t k = 0; k < cs.ris_count(); ++k) {
        const ComplexMatrix& h1 = cs.h1[k];
        const ComplexMatrix& h2 = cs.h2[k];
        const PhaseConfig& phase = phases[k];
        if (h1.rows() != n_tx || h2.rows() != h1.cols() || h2.cols() != 1 || phase.size() != h1.cols()) {
            throw InputError("effective_channel: dimension mismatch at RIS " + std::to_string(k));
        }
        for (std::size_t i = 0; i < h1.cols(); ++i) {
            const Complex weight = std::conj(h2(i, 0)) * phase_to_coefficient(phase.values[i], phase.states);
            for (std::size_t n = 0; n < n_tx; ++n) {
                m(0, n) += weight * std::conj(h1(n, i));
            }
        }
    }
    return m;
}

double snr(const ChannelSet& cs, std::span<const PhaseConfig> phases, const ComplexMatrix& v,
           const LinkBudget& budget)
{
    const ComplexMatrix m = effective_channel(cs, phases);
    if (v.rows() != m.cols() || v.cols() != 1) {
        throw InputError("snr: precoder has the wrong shape");
    }
    Complex acc{};
    for (std::size_t n = 0; n < m.cols(); ++n) {
        acc += m(0, n) * v(n, 0);
    }
    return budget.snr_scale() * std::norm(acc);
}

double rate(double gamma)
{
    if (gamma < 0.0 || std::isnan(gamma)) {
        throw InputError("rate: SNR must be non-negative");
    }
    return std::log2(1.0 + gamma);
}

ElementTerms::ElementTerms(const ChannelSet& cs, const ComplexMatrix& v, const LinkBudget& budget)
    : scale(budget.snr_scale())
{
    const std::size_t n_tx = cs.n_tx();
    if (v.rows() != n_tx || v.cols() != 1) {
        throw InputError("ElementTerms: precoder has the wrong shape");
    }
    for (std::size_t n = 0; n < n_tx; ++n) {
        direct += std::conj(cs.h(n, 0)) * v(n, 0);
    }
    for (std::size_t k = 0; k < cs.ris_count(); ++k) {
        const ComplexMatrix& h1 = cs.h1[k];
        const ComplexMatrix& h2 = cs.h2[k];
        for (std::size_t i = 0; i < h1.cols(); ++i) {
            Complex projected{};
            for (std::size_t n = 0; n < n_tx; ++n) {
                projected += std::conj(h1(n, i)) * v(n, 0);
            }
            terms.push_back(std::conj(h2(i, 0)) * projected);
        }
    }
}

double ElementTerms::gamma(std::span<const Complex> coefficients) const
{
    if (coefficients.size() != terms.size()) {
        throw InputError("ElementTerms::gamma: coefficient count mismatch");
    }
    Complex acc = direct;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        acc += coefficients[i] * terms[i];
    }
    return scale * std::norm(acc);
}

} // namespace risne
