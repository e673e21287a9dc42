#pragma once

#include <cmath>
#include <complex>
#include <string_view>
#include <variant>

#include "ergoflux/state.hpp"

namespace ergoflux {

// Generalized amplitude damping. gamma is the bare rate: gamma_- = gamma (1 + n),
// gamma_+ = gamma n, so at n = 0 gamma is the emission rate.
struct Gadc {
    double gamma = 0.0;
    double n_bose = 0.0;
    double h_z = 1.0;

    double a() const { return 1.0 + 2.0 * n_bose; }
    double gamma_minus() const { return gamma * (1.0 + n_bose); }
    double gamma_plus() const { return gamma * n_bose; }
};

// dephasing + depolarising with gamma_x = gamma_y = gamma_perp
struct Pauli {
    double gamma_perp = 0.0;
    double gamma_z = 0.0;
    double h_z = 1.0;
};

// qutrit ladder, every one of the three downward jumps at rate gamma
struct QutritAdc {
    double gamma = 0.0;
    double h_z = 1.0;
};

// qubit amplitude damping into a zero-temperature Lorentzian bath
struct NonMarkovAdc {
    double gamma = 0.0;
    double lambda = 0.0;
    double delta = 0.0;
    double h_z = 1.0;
};

using ChannelSpec = std::variant<Gadc, Pauli, QutritAdc, NonMarkovAdc>;

void validate(const ChannelSpec& c); // throws physics
int channel_dim(const ChannelSpec& c);
std::string_view channel_name(const ChannelSpec& c);
double channel_h_z(const ChannelSpec& c);
BatteryHamiltonian hamiltonian(const ChannelSpec& c);
bool is_markovian(const ChannelSpec& c);

// n = 1/(exp(2 h_z / T) - 1), units with k_B = 1
double bose_occupation(double temperature, double h_z);

// Slowest nonzero relaxation rate. For the non-Markovian channel this is the
// bath width lambda (memory decays on 1/lambda).
double slowest_rate(const ChannelSpec& c);
// 100 / slowest rate for Markovian channels, 20 / lambda otherwise
double default_horizon(const ChannelSpec& c);

// x + sqrt(x^2 + y) for y >= 0 without cancellation when x < 0 or overflow when y is tiny
inline double ergo_form(double x, double y) {
    const double r = std::sqrt(x * x + y);
    if (x >= 0.0) return x + r;
    const double den = r - x;
    return den > 0.0 ? y / den : 0.0;
}

// ---- closed forms ----

BlochVector gadc_bloch_evolve(const BlochVector& b0, const Gadc& c, double t);
double gadc_ergotropy(const BlochVector& b0, const Gadc& c, double t);
BlochVector pauli_bloch_evolve(const BlochVector& b0, const Pauli& c, double t);
double pauli_ergotropy(const BlochVector& b0, const Pauli& c, double t); // requires m_y = 0
QutritDiagonal qutrit_diagonal_evolve(const QutritDiagonal& q0, const QutritAdc& c, double t);
std::complex<double> nm_amplitude(const NonMarkovAdc& c, double t);
// Bloch vector in the frame rotating with the battery Hamiltonian
BlochVector nm_bloch_evolve(const BlochVector& b0, const NonMarkovAdc& c, double t);
double nm_ergotropy(const BlochVector& b0, const NonMarkovAdc& c, double t);

DensityMatrix steady_state(const ChannelSpec& c);
// full state at time t from the analytic solution of each model
DensityMatrix evolve_closed_form(const DensityMatrix& rho0, const ChannelSpec& c, double t);

// ---- sampling kernels ----
//
// Scans evaluate the same curves at the same times for thousands of states.
// Each kernel splits the closed form into a state-independent factor (computed
// once per time) and a cheap state-dependent part.

struct GadcKernel {
    using State = BlochVector;
    struct Factors {
        double u; // exp(-a gamma t)
    };
    Gadc c;

    Factors at(double t) const { return {std::exp(-c.a() * c.gamma * t)}; }
    double ergotropy(const State& s, const Factors& f) const;
    double distance(const State& s, const Factors& f) const;
    // sign of lim (E(s1) - E(s2)) as t -> infinity, 0 if the curves coincide there
    int asymptotic_order(const State& s1, const State& s2) const;
    int asymptotic_distance_order(const State& s1, const State& s2) const;
};

struct PauliKernel {
    using State = BlochVector;
    struct Factors {
        double zd; // exp(-4 gamma_perp t)
        double xd; // exp(-2 (gamma_perp + gamma_z) t)
    };
    Pauli c;

    Factors at(double t) const {
        return {std::exp(-4.0 * c.gamma_perp * t), std::exp(-2.0 * (c.gamma_perp + c.gamma_z) * t)};
    }
    double ergotropy(const State& s, const Factors& f) const;
    double distance(const State& s, const Factors& f) const;
    int asymptotic_order(const State& s1, const State& s2) const;
    int asymptotic_distance_order(const State& s1, const State& s2) const;
};

struct QutritKernel {
    using State = QutritDiagonal;
    struct Factors {
        double u; // exp(-gamma t)
    };
    QutritAdc c;

    Factors at(double t) const { return {std::exp(-c.gamma * t)}; }
    double ergotropy(const State& s, const Factors& f) const;
    double distance(const State& s, const Factors& f) const;
    // diagonal states all become passive in finite time: no asymptotic ordering
    int asymptotic_order(const State&, const State&) const { return 0; }
    int asymptotic_distance_order(const State& s1, const State& s2) const;
};

struct NmKernel {
    using State = BlochVector;
    struct Factors {
        double q; // |nu(t)|^2
    };
    NonMarkovAdc c;

    Factors at(double t) const { return {std::norm(nm_amplitude(c, t))}; }
    double ergotropy(const State& s, const Factors& f) const;
    double distance(const State& s, const Factors& f) const;
    int asymptotic_order(const State& s1, const State& s2) const;
    int asymptotic_distance_order(const State& s1, const State& s2) const;
};

} // namespace ergoflux
