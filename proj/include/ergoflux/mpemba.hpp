#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "ergoflux/channels.hpp"
#include "ergoflux/crossing.hpp"
#include "ergoflux/state.hpp"

namespace ergoflux {

struct Trajectory {
    std::vector<double> times;
    std::vector<double> ergotropy_total;
    std::vector<double> ergotropy_incoherent;
    std::vector<double> ergotropy_coherent;
    std::vector<double> trace_distance_to_ss;
};

Trajectory trajectory(const DensityMatrix& rho0, const ChannelSpec& c, double t_max, std::size_t n_points);

// Ergotropy and distance-to-steady-state of one initial state as functions of time.
// Qubits and diagonal qutrits go through the sampling kernels; a qutrit with
// coherences falls back to the full closed-form state.
class Curve {
public:
    Curve(const DensityMatrix& rho0, const ChannelSpec& c);
    double ergotropy(double t) const;
    double distance(double t) const;

private:
    ChannelSpec c_;
    DensityMatrix rho0_;
    DensityMatrix ss_;
    BatteryHamiltonian h_;
    BlochVector bloch_{};
    std::optional<QutritDiagonal> diag_;
};

// all sign changes of the ergotropy difference on (0, t_max]
CrossingReport ergotropic_crossings(const DensityMatrix& rho1, const DensityMatrix& rho2, const ChannelSpec& c,
                                    double t_max, double refine_tol = 0.0);
// same for the trace distance to the steady state
CrossingReport state_mpemba_crossings(const DensityMatrix& rho1, const DensityMatrix& rho2, const ChannelSpec& c,
                                      double t_max, double refine_tol = 0.0);

struct PureCrossingTime {
    enum class Kind { finite, divergent, degenerate };
    Kind kind = Kind::divergent;
    double time = 0.0; // meaningful only for finite
};
std::string_view kind_name(PureCrossingTime::Kind k);

// crossing time of two pure states (polar angles, m_z = cos theta) under the GADC
PureCrossingTime crossing_time_pure_gadc(double theta1, double theta2, const Gadc& c);

// Area fraction between two ergotropy curves on their shared grid, integrated up to
// the time both curves stay below 1e-6 of the larger initial value.
double mpemba_parameter(const Trajectory& traj1, const Trajectory& traj2);

enum class EmcPrediction { no_crossing, crossing, not_covered };
std::string_view prediction_name(EmcPrediction p);

EmcPrediction predict_emc_gadc(const BlochVector& b1, const BlochVector& b2);
EmcPrediction predict_emc_pauli(const BlochVector& b1, const BlochVector& b2, const Pauli& c);

enum class Lemma { L1, L2, L3, L4 };
std::string_view lemma_name(Lemma l);

struct LemmaSample {
    BlochVector state;
    double t = 0.0;
    double derivative = 0.0;
};

struct LemmaReport {
    Lemma lemma = Lemma::L1;
    std::size_t samples = 0;
    std::size_t violations = 0;
    std::vector<LemmaSample> violation_samples; // first few, in sample order
};

// Finite-difference sign checks (step 1e-6) of dE/dm_z: along the isoergotropic
// curve for L1/L3 (must be < 0), at fixed m_x for L2/L4 (must be > 0, >= 0 on m_x = 0).
LemmaReport verify_lemma_monotonicity(Lemma lemma, std::size_t samples, const ChannelSpec& c, std::uint64_t seed = 1);

// uniform double in [0, 1) from 53 random bits; identical on every platform
double unit_uniform(std::uint64_t bits);

} // namespace ergoflux
