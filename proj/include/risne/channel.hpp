// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "risne/numerics.hpp"
#include "risne/rng.hpp"

namespace risne {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
    bool operator==(const Vec3&) const = default;
};

double dot(const Vec3& a, const Vec3& b);
double norm(const Vec3& v);
Vec3 normalized(const Vec3& v);

/// Linear arrays lie along +x. Planar arrays are square, columns along +x and
/// rows along +z; element index = row * side + column.
enum class ArrayGeometry { linear, planar };

/// Array response exp(j 2pi/lambda <d, r_n>) with element 0 at the origin.
ComplexMatrix steering_vector(ArrayGeometry geometry, std::size_t n_elements, const Vec3& direction,
                              double wavelength, double spacing);

/// Scenario geometry and radio parameters. Angles are always derived from the
/// positions. Powers stay in dBm here; conversion happens in LinkBudget.
struct ScenarioConfig {
    std::size_t n_tx = 16;
    std::size_t n_ris = 400;
    Vec3 tx_position{0.0, 0.0, 2.0};
    Vec3 rx_position{8.0, 10.0, 1.5};
    std::vector<Vec3> ris_positions{{0.0, 3.0, 2.0}};

    double kappa_h_db = 10.0;  ///< direct TX-RX link
    double kappa_h1_db = 10.0; ///< TX-RIS links, used only when h1_los is false
    double kappa_h2_db = 10.0; ///< RIS-RX links
    bool h1_los = true;        ///< TX-RIS links are pure LOS
    bool direct_blocked = true;
    double direct_attenuation_db = 0.0;

    double carrier_wavelength = 0.1;
    bool pathloss = true; ///< free-space pathloss per link segment

    double tx_power_dbm = 30.0;
    double noise_dbm = -50.0;
    std::size_t horizon = 50;

    std::size_t ris_count() const { return ris_positions.size(); }
    std::size_t ris_side() const;
    double element_spacing() const { return 0.5 * carrier_wavelength; }

    /// Throws ConfigError naming the offending field.
    void validate() const;

    bool operator==(const ScenarioConfig&) const = default;
};

/// One coherence-block realization: h (N_TX x 1), and per RIS H1 (N_TX x N_RIS)
/// and h2 (N_RIS x 1).
struct ChannelSet {
    ComplexMatrix h;
    std::vector<ComplexMatrix> h1;
    std::vector<ComplexMatrix> h2;

    std::size_t ris_count() const { return h1.size(); }
    std::size_t n_tx() const { return h.rows(); }
    std::size_t n_ris() const { return h1.empty() ? 0 : h1.front().cols(); }

    bool operator==(const ChannelSet&) const = default;
};

/// Converts a Ricean factor in dB to linear scale; -inf maps to 0.
double kappa_linear(double kappa_db);

/// sqrt(P) * (sqrt(k/(k+1)) * los_unit + sqrt(1/(k+1)) * G), G ~ CN(0, 1) i.i.d.
/// LOS entries are normalized to unit modulus.
ComplexMatrix sample_ricean(std::size_t rows, std::size_t cols, double kappa_db, const ComplexMatrix& los,
                            double avg_power, Rng& rng);

/// Free-space power gain (lambda / (4 pi d))^2.
double free_space_gain(double distance, double wavelength);

/// Precomputes LOS components and link powers for a scenario; sampling is then
/// cheap and thread-safe.
class ChannelModel {
public:
    explicit ChannelModel(ScenarioConfig cfg);

    const ScenarioConfig& config() const { return cfg_; }
    ChannelSet sample(Rng& rng) const;

    const ComplexMatrix& direct_los() const { return h_los_; }
    const ComplexMatrix& tx_ris_los(std::size_t k) const { return h1_los_[k]; }
    const ComplexMatrix& ris_rx_los(std::size_t k) const { return h2_los_[k]; }

private:
    ScenarioConfig cfg_;
    ComplexMatrix h_los_;
    double h_power_ = 0.0;
    std::vector<ComplexMatrix> h1_los_;
    std::vector<double> h1_power_;
    std::vector<ComplexMatrix> h2_los_;
    std::vector<double> h2_power_;
};

ChannelSet sample_channel_set(const ScenarioConfig& cfg, Rng& rng);

/// Real-valued network inputs for one RIS: h~ (2N_TX x 1), H1~ (2N_TX x N_RIS),
/// h2~ (2N_RIS x 1). Real parts are stacked above imaginary parts.
struct RealChannelView {
    RealMatrix h;
    RealMatrix h1;
    RealMatrix h2;
};

RealMatrix stack_real_imag(const ComplexMatrix& m);
RealChannelView stack_real_imag(const ChannelSet& cs, std::size_t ris = 0);

/// Scales a matrix so its entries have unit RMS magnitude; all-zero input is
/// returned unchanged. Network inputs pass through this because raw gains sit
/// many orders of magnitude below one after pathloss.
ComplexMatrix rms_normalized(const ComplexMatrix& m);

/// h2 + eps^2 * g, g ~ CN(0, alpha * ||h2|| I).
ComplexMatrix perturb_h2(const ComplexMatrix& h2, double epsilon, double alpha, Rng& rng);

// --- channel sources -----------------------------------------------------------

/// Anything that yields one ChannelSet per coherence block. Implementations are
/// immutable so a source can be shared by concurrent fitness evaluations.
class ChannelSource {
public:
    virtual ~ChannelSource() = default;
    virtual ChannelSet draw(Rng& rng) const = 0;
};

class StochasticChannelSource : public ChannelSource {
public:
    explicit StochasticChannelSource(const ScenarioConfig& cfg) : model_(cfg) {}
    ChannelSet draw(Rng& rng) const override { return model_.sample(rng); }

private:
    ChannelModel model_;
};

/// Always returns the same realization (frozen channels).
class FixedChannelSource : public ChannelSource {
public:
    explicit FixedChannelSource(ChannelSet cs) : cs_(std::move(cs)) {}
    ChannelSet draw(Rng&) const override { return cs_; }

private:
    ChannelSet cs_;
};

/// Draws uniformly from a recorded list of realizations.
class ReplayChannelSource : public ChannelSource {
public:
    explicit ReplayChannelSource(std::vector<ChannelSet> records);
    ChannelSet draw(Rng& rng) const override;
    std::size_t size() const { return records_.size(); }

private:
    std::vector<ChannelSet> records_;
};

/// Wraps another source and perturbs every RIS-RX vector on the way out.
class PerturbedChannelSource : public ChannelSource {
public:
    PerturbedChannelSource(std::shared_ptr<const ChannelSource> inner, double epsilon, double alpha);
    ChannelSet draw(Rng& rng) const override;

private:
    std::shared_ptr<const ChannelSource> inner_;
    double epsilon_;
    double alpha_;
};

} // namespace risne
