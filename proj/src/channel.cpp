// SPDX-License-Identifier: Apache-2.0
#include "risne/channel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace risne {

double dot(const Vec3& a, const Vec3& b)
{
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

double norm(const Vec3& v)
{
    return std::sqrt(dot(v, v));
}

Vec3 normalized(const Vec3& v)
{
    const double n = norm(v);
    if (n == 0.0) {
        throw InputError("normalized: zero vector");
    }
    return (1.0 / n) * v;
}

namespace {

std::size_t exact_sqrt(std::size_t n)
{
    auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
    return side * side == n ? side : 0;
}

ComplexMatrix conj(const ComplexMatrix& m)
{
    ComplexMatrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.size(); ++i) {
        out[i] = std::conj(m[i]);
    }
    return out;
}

} // namespace

ComplexMatrix steering_vector(ArrayGeometry geometry, std::size_t n_elements, const Vec3& direction,
                              double wavelength, double spacing)
{
    if (!(spacing > 0.0) || !(wavelength > 0.0)) {
        throw InputError("steering_vector: spacing and wavelength must be positive");
    }
    if (std::abs(norm(direction) - 1.0) > 1e-9) {
        throw InputError("steering_vector: direction must be a unit vector");
    }
    const double k = 2.0 * std::numbers::pi / wavelength;
    ComplexMatrix a(n_elements, 1);
    if (geometry == ArrayGeometry::linear) {
        for (std::size_t n = 0; n < n_elements; ++n) {
            const double phase = k * direction.x * spacing * static_cast<double>(n);
            a(n, 0) = std::polar(1.0, phase);
        }
        return a;
    }
    const std::size_t side = exact_sqrt(n_elements);
    if (side == 0) {
        throw InputError("steering_vector: planar array needs a square element count, got " +
                         std::to_string(n_elements));
    }
    for (std::size_t row = 0; row < side; ++row) {
        for (std::size_t col = 0; col < side; ++col) {
            const double phase =
                k * spacing * (direction.x * static_cast<double>(col) + direction.z * static_cast<double>(row));
            a(row * side + col, 0) = std::polar(1.0, phase);
        }
    }
    return a;
}

std::size_t ScenarioConfig::ris_side() const
{
    return exact_sqrt(n_ris);
}

void ScenarioConfig::validate() const
{
    auto fail = [](const std::string& field, const std::string& why) {
        throw ConfigError("scenario." + field + ": " + why);
    };
    if (n_tx < 1) {
        fail("n_tx", "must be at least 1");
    }
    if (n_ris < 1 || ris_side() == 0) {
        fail("n_ris", "must be a positive perfect square (square planar RIS), got " + std::to_string(n_ris));
    }
    if (ris_positions.empty()) {
        fail("ris_positions", "at least one RIS is required");
    }
    if (horizon < 1) {
        fail("horizon", "must be at least 1");
    }
    if (!(carrier_wavelength > 0.0) || !std::isfinite(carrier_wavelength)) {
        fail("carrier_wavelength", "must be positive and finite");
    }
    for (const auto& [name, value] : {std::pair{"tx_power_dbm", tx_power_dbm}, std::pair{"noise_dbm", noise_dbm},
                                      std::pair{"direct_attenuation_db", direct_attenuation_db}}) {
        if (!std::isfinite(value)) {
            fail(name, "must be finite");
        }
    }
    for (const auto& [name, value] : {std::pair{"kappa_h_db", kappa_h_db}, std::pair{"kappa_h1_db", kappa_h1_db},
                                      std::pair{"kappa_h2_db", kappa_h2_db}}) {
        if (std::isnan(value)) {
            fail(name, "must not be NaN");
        }
    }
    std::vector<Vec3> points{tx_position, rx_position};
    points.insert(points.end(), ris_positions.begin(), ris_positions.end());
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            if (norm(points[i] - points[j]) <= 0.0) {
                fail("positions", "TX, RX and RIS positions must be pairwise distinct");
            }
        }
    }
}

double kappa_linear(double kappa_db)
{
    if (kappa_db == -std::numeric_limits<double>::infinity()) {
        return 0.0;
    }
    return std::pow(10.0, kappa_db / 10.0);
}

ComplexMatrix sample_ricean(std::size_t rows, std::size_t cols, double kappa_db, const ComplexMatrix& los,
                            double avg_power, Rng& rng)
{
    if (los.rows() != rows || los.cols() != cols) {
        throw InputError("sample_ricean: LOS component has the wrong shape");
    }
    if (!(avg_power > 0.0)) {
        throw InputError("sample_ricean: avg_power must be positive");
    }
    const double kappa = kappa_linear(kappa_db);
    double los_weight = 1.0;
    double nlos_weight = 0.0;
    if (std::isfinite(kappa)) {
        los_weight = std::sqrt(kappa / (kappa + 1.0));
        nlos_weight = std::sqrt(1.0 / (kappa + 1.0));
    }
    const double amplitude = std::sqrt(avg_power);
    ComplexMatrix out(rows, cols);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double mag = std::abs(los[i]);
        const Complex los_unit = mag > 0.0 ? los[i] / mag : Complex{};
        out[i] = amplitude * (los_weight * los_unit + nlos_weight * rng.complex_normal());
    }
    return out;
}

double free_space_gain(double distance, double wavelength)
{
    const double a = wavelength / (4.0 * std::numbers::pi * distance);
    return a * a;
}

ChannelModel::ChannelModel(ScenarioConfig cfg) : cfg_(std::move(cfg))
{
    cfg_.validate();
    const double lambda = cfg_.carrier_wavelength;
    const double spacing = cfg_.element_spacing();
    auto gain = [&](const Vec3& a, const Vec3& b) {
        return cfg_.pathloss ? free_space_gain(norm(a - b), lambda) : 1.0;
    };
    auto tx_response = [&](const Vec3& toward) {
        return steering_vector(ArrayGeometry::linear, cfg_.n_tx, normalized(toward - cfg_.tx_position), lambda,
                               spacing);
    };

    h_los_ = conj(tx_response(cfg_.rx_position));
    h_power_ = gain(cfg_.tx_position, cfg_.rx_position) * std::pow(10.0, -cfg_.direct_attenuation_db / 10.0);

    for (const Vec3& ris : cfg_.ris_positions) {
        const ComplexMatrix a_tx = tx_response(ris);
        const ComplexMatrix a_ris_tx =
            steering_vector(ArrayGeometry::planar, cfg_.n_ris, normalized(cfg_.tx_position - ris), lambda, spacing);
        const ComplexMatrix a_ris_rx =
            steering_vector(ArrayGeometry::planar, cfg_.n_ris, normalized(cfg_.rx_position - ris), lambda, spacing);

        // H1^H maps TX antennas onto RIS elements, so H1[n, m] = conj(a_tx[n] a_ris[m]).
        ComplexMatrix h1(cfg_.n_tx, cfg_.n_ris);
        for (std::size_t n = 0; n < cfg_.n_tx; ++n) {
            for (std::size_t m = 0; m < cfg_.n_ris; ++m) {
                h1(n, m) = std::conj(a_tx(n, 0) * a_ris_tx(m, 0));
            }
        }
        h1_los_.push_back(std::move(h1));
        h1_power_.push_back(gain(cfg_.tx_position, ris));
        h2_los_.push_back(conj(a_ris_rx));
        h2_power_.push_back(gain(ris, cfg_.rx_position));
    }
}

ChannelSet ChannelModel::sample(Rng& rng) const
{
    ChannelSet cs;
    if (cfg_.direct_blocked) {
        cs.h = ComplexMatrix(cfg_.n_tx, 1);
    } else {
        cs.h = sample_ricean(cfg_.n_tx, 1, cfg_.kappa_h_db, h_los_, h_power_, rng);
    }
    const std::size_t k_count = cfg_.ris_count();
    cs.h1.reserve(k_count);
    cs.h2.reserve(k_count);
    for (std::size_t k = 0; k < k_count; ++k) {
        if (cfg_.h1_los) {
            ComplexMatrix h1 = h1_los_[k];
            const double amplitude = std::sqrt(h1_power_[k]);
            for (std::size_t i = 0; i < h1.size(); ++i) {
                h1[i] *= amplitude;
            }
            cs.h1.push_back(std::move(h1));
        } else {
            cs.h1.push_back(sample_ricean(cfg_.n_tx, cfg_.n_ris, cfg_.kappa_h1_db, h1_los_[k], h1_power_[k], rng));
        }
        cs.h2.push_back(sample_ricean(cfg_.n_ris, 1, cfg_.kappa_h2_db, h2_los_[k], h2_power_[k], rng));
    }
    return cs;
}

ChannelSet sample_channel_set(const ScenarioConfig& cfg, Rng& rng)
{
    return ChannelModel(cfg).sample(rng);
}

RealMatrix stack_real_imag(const ComplexMatrix& m)
{
    RealMatrix out(2 * m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            out(r, c) = m(r, c).real();
            out(r + m.rows(), c) = m(r, c).imag();
        }
    }
    return out;
}

RealChannelView stack_real_imag(const ChannelSet& cs, std::size_t ris)
{
    if (ris >= cs.ris_count()) {
        throw InputError("stack_real_imag: RIS index out of range");
    }
    return {stack_real_imag(cs.h), stack_real_imag(cs.h1[ris]), stack_real_imag(cs.h2[ris])};
}

ComplexMatrix rms_normalized(const ComplexMatrix& m)
{
    double power = 0.0;
    for (const Complex& v : m.data()) {
        power += std::norm(v);
    }
    if (power == 0.0 || m.size() == 0) {
        return m;
    }
    const double scale = 1.0 / std::sqrt(power / static_cast<double>(m.size()));
    ComplexMatrix out = m;
    for (Complex& v : out.data()) {
        v *= scale;
    }
    return out;
}

ComplexMatrix perturb_h2(const ComplexMatrix& h2, double epsilon, double alpha, Rng& rng)
{
    if (epsilon < 0.0 || alpha < 0.0) {
        throw InputError("perturb_h2: epsilon and alpha must be non-negative");
    }
    double norm_sq = 0.0;
    for (const Complex& v : h2.data()) {
        norm_sq += std::norm(v);
    }
    const double variance = alpha * std::sqrt(norm_sq);
    const double scale = epsilon * epsilon;
    ComplexMatrix out = h2;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] += scale * rng.complex_normal(variance);
    }
    return out;
}

ReplayChannelSource::ReplayChannelSource(std::vector<ChannelSet> records) : records_(std::move(records))
{
    if (records_.empty()) {
        throw InputError("ReplayChannelSource: no records");
    }
}

ChannelSet ReplayChannelSource::draw(Rng& rng) const
{
    return records_[rng.uniform_index(records_.size())];
}

PerturbedChannelSource::PerturbedChannelSource(std::shared_ptr<const ChannelSource> inner, double epsilon,
                                               double alpha)
    : inner_(std::move(inner)), epsilon_(epsilon), alpha_(alpha)
{
    if (!inner_) {
        throw InputError("PerturbedChannelSource: null inner source");
    }
    if (epsilon < 0.0 || alpha < 0.0) {
        throw InputError("PerturbedChannelSource: epsilon and alpha must be non-negative");
    }
}

ChannelSet PerturbedChannelSource::draw(Rng& rng) const
{
    ChannelSet cs = inner_->draw(rng);
    for (auto& h2 : cs.h2) {
        h2 = perturb_h2(h2, epsilon_, alpha_, rng);
    }
    return cs;
}

} // namespace risne
