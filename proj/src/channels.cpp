#include "ergoflux/channels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ergoflux/error.hpp"

namespace ergoflux {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

void require(bool ok, const std::string& what) {
    if (!ok) fail(ErrorCategory::physics, what);
}

int sgn(double v) { return (v > 0.0) - (v < 0.0); }

} // namespace

void validate(const ChannelSpec& c) {
    std::visit(overloaded{
                   [](const Gadc& g) {
                       require(finite_nonneg(g.gamma), "gadc: gamma must be a finite rate >= 0");
                       require(finite_nonneg(g.n_bose), "gadc: n_bose must be >= 0");
                       require(std::isfinite(g.h_z) && g.h_z > 0.0, "gadc: h_z must be > 0");
                   },
                   [](const Pauli& p) {
                       require(finite_nonneg(p.gamma_perp), "pauli: gamma_perp must be >= 0");
                       require(finite_nonneg(p.gamma_z), "pauli: gamma_z must be >= 0");
                       require(std::isfinite(p.h_z) && p.h_z > 0.0, "pauli: h_z must be > 0");
                   },
                   [](const QutritAdc& q) {
                       require(finite_nonneg(q.gamma), "qutrit_adc: gamma must be >= 0");
                       require(std::isfinite(q.h_z) && q.h_z > 0.0, "qutrit_adc: h_z must be > 0");
                   },
                   [](const NonMarkovAdc& n) {
                       require(std::isfinite(n.gamma) && n.gamma > 0.0, "nm_adc: gamma must be > 0");
                       require(std::isfinite(n.lambda) && n.lambda > 0.0, "nm_adc: lambda must be > 0");
                       require(std::isfinite(n.delta), "nm_adc: delta must be finite");
                       require(std::isfinite(n.h_z) && n.h_z > 0.0, "nm_adc: h_z must be > 0");
                   },
               },
               c);
}

int channel_dim(const ChannelSpec& c) { return std::holds_alternative<QutritAdc>(c) ? 3 : 2; }

std::string_view channel_name(const ChannelSpec& c) {
    return std::visit(overloaded{
                          [](const Gadc&) { return std::string_view("gadc"); },
                          [](const Pauli&) { return std::string_view("pauli"); },
                          [](const QutritAdc&) { return std::string_view("qutrit_adc"); },
                          [](const NonMarkovAdc&) { return std::string_view("nm_adc"); },
                      },
                      c);
}

double channel_h_z(const ChannelSpec& c) {
    return std::visit([](const auto& ch) { return ch.h_z; }, c);
}

BatteryHamiltonian hamiltonian(const ChannelSpec& c) {
    return BatteryHamiltonian::for_dim(channel_dim(c), channel_h_z(c));
}

bool is_markovian(const ChannelSpec& c) { return !std::holds_alternative<NonMarkovAdc>(c); }

double bose_occupation(double temperature, double h_z) {
    if (!std::isfinite(temperature) || temperature < 0.0)
        fail(ErrorCategory::physics, "temperature must be finite and >= 0");
    if (temperature == 0.0) return 0.0;
    return 1.0 / std::expm1(2.0 * h_z / temperature);
}

double slowest_rate(const ChannelSpec& c) {
    const double r = std::visit(
        overloaded{
            [](const Gadc& g) { return 0.5 * g.a() * g.gamma; },
            [](const Pauli& p) {
                const double rz = 4.0 * p.gamma_perp;
                const double rx = 2.0 * (p.gamma_perp + p.gamma_z);
                if (rz > 0.0 && rx > 0.0) return std::min(rz, rx);
                return std::max(rz, rx);
            },
            [](const QutritAdc& q) { return 0.5 * q.gamma; },
            [](const NonMarkovAdc& n) { return n.lambda; },
        },
        c);
    if (!(r > 0.0)) fail(ErrorCategory::domain, "channel has no relaxation (all rates zero)");
    return r;
}

double default_horizon(const ChannelSpec& c) {
    if (const auto* nm = std::get_if<NonMarkovAdc>(&c)) return 20.0 / nm->lambda;
    return 100.0 / slowest_rate(c);
}

// ---- kernels ----

double GadcKernel::ergotropy(const State& s, const Factors& f) const {
    const double a = c.a();
    const double perp2 = s.x * s.x + s.y * s.y;
    return c.h_z / a * ergo_form(f.u * (1.0 + a * s.z) - 1.0, a * a * f.u * perp2);
}

double GadcKernel::distance(const State& s, const Factors& f) const {
    const double dz = (s.z + 1.0 / c.a()) * f.u;
    const double perp2 = s.x * s.x + s.y * s.y;
    return 0.5 * std::sqrt(dz * dz + perp2 * f.u);
}

int GadcKernel::asymptotic_order(const State& s1, const State& s2) const {
    // E ~ (a/2) m_perp^2 u at late times; equal coherence falls back on m_z
    const double p1 = s1.x * s1.x + s1.y * s1.y;
    const double p2 = s2.x * s2.x + s2.y * s2.y;
    if (p1 != p2) return sgn(p1 - p2);
    if (p1 > 0.0) return sgn(s1.z - s2.z);
    // incoherent states: E = 2 max(0, m_z(t)) eventually zero for both
    return 0;
}

int GadcKernel::asymptotic_distance_order(const State& s1, const State& s2) const {
    const double p1 = s1.x * s1.x + s1.y * s1.y;
    const double p2 = s2.x * s2.x + s2.y * s2.y;
    if (p1 != p2) return sgn(p1 - p2);
    const double inv = 1.0 / c.a();
    return sgn(std::abs(s1.z + inv) - std::abs(s2.z + inv));
}

double PauliKernel::ergotropy(const State& s, const Factors& f) const {
    const double perp2 = s.x * s.x + s.y * s.y;
    return c.h_z * ergo_form(s.z * f.zd, perp2 * f.xd * f.xd);
}

double PauliKernel::distance(const State& s, const Factors& f) const {
    const double perp2 = s.x * s.x + s.y * s.y;
    const double z = s.z * f.zd;
    return 0.5 * std::sqrt(z * z + perp2 * f.xd * f.xd);
}

int PauliKernel::asymptotic_order(const State& s1, const State& s2) const {
    const double c1 = std::hypot(s1.x, s1.y);
    const double c2 = std::hypot(s2.x, s2.y);
    if (c.gamma_perp == c.gamma_z) {
        // curves are scaled copies of their initial values
        return sgn((s1.z + std::hypot(c1, s1.z)) - (s2.z + std::hypot(c2, s2.z)));
    }
    if (c.gamma_perp > c.gamma_z) {
        // coherent part decays slowest
        if (c1 != c2) return sgn(c1 - c2);
        return sgn(s1.z - s2.z);
    }
    // population part decays slowest: classes m_z > 0 (rate 4 g_perp),
    // m_z = 0 with coherence (2 (g_perp + g_z)), m_z < 0 with coherence (4 g_z), passive
    auto cls = [](double z, double coh) {
        if (z > 0.0) return 3;
        if (coh > 0.0) return z == 0.0 ? 2 : 1;
        return 0;
    };
    const int k1 = cls(s1.z, c1), k2 = cls(s2.z, c2);
    if (k1 != k2) return sgn(k1 - k2);
    switch (k1) {
    case 3: return sgn(s1.z - s2.z);
    case 2: return sgn(c1 - c2);
    case 1: return sgn(c1 * c1 / -s1.z - c2 * c2 / -s2.z);
    default: return 0;
    }
}

int PauliKernel::asymptotic_distance_order(const State& s1, const State& s2) const {
    const double c1 = std::hypot(s1.x, s1.y);
    const double c2 = std::hypot(s2.x, s2.y);
    const double z1 = std::abs(s1.z), z2 = std::abs(s2.z);
    if (c.gamma_perp == c.gamma_z) return sgn(std::hypot(c1, z1) - std::hypot(c2, z2));
    if (c.gamma_perp > c.gamma_z) {
        if (c1 != c2) return sgn(c1 - c2);
        return sgn(z1 - z2);
    }
    if (z1 != z2) return sgn(z1 - z2);
    return sgn(c1 - c2);
}

double QutritKernel::ergotropy(const State& s, const Factors& f) const {
    const double u = f.u;
    const double top = s.p1 * u * u;
    const double mid = (s.p1 + s.p2) * u - top;
    const double ground = 1.0 - top - mid;
    // passive energy pairs the largest population with the lowest level
    double p[3] = {top, mid, ground};
    std::sort(p, p + 3, [](double x, double y) { return x > y; });
    const double energy = c.h_z * (top - ground);
    const double passive = c.h_z * (p[2] - p[0]);
    return std::max(0.0, energy - passive);
}

double QutritKernel::distance(const State& s, const Factors& f) const {
    // ground-state target: D = top + mid
    return (s.p1 + s.p2) * f.u;
}

int QutritKernel::asymptotic_distance_order(const State& s1, const State& s2) const {
    return sgn((s1.p1 + s1.p2) - (s2.p1 + s2.p2));
}

double NmKernel::ergotropy(const State& s, const Factors& f) const {
    const double perp2 = s.x * s.x + s.y * s.y;
    return c.h_z * ergo_form(f.q * (1.0 + s.z) - 1.0, f.q * perp2);
}

double NmKernel::distance(const State& s, const Factors& f) const {
    const double perp2 = s.x * s.x + s.y * s.y;
    const double dz = f.q * (1.0 + s.z);
    return 0.5 * std::sqrt(dz * dz + perp2 * f.q);
}

int NmKernel::asymptotic_order(const State& s1, const State& s2) const {
    const double p1 = s1.x * s1.x + s1.y * s1.y;
    const double p2 = s2.x * s2.x + s2.y * s2.y;
    if (p1 != p2) return sgn(p1 - p2);
    if (p1 > 0.0) return sgn(s1.z - s2.z);
    return 0;
}

int NmKernel::asymptotic_distance_order(const State& s1, const State& s2) const {
    const double p1 = s1.x * s1.x + s1.y * s1.y;
    const double p2 = s2.x * s2.x + s2.y * s2.y;
    if (p1 != p2) return sgn(p1 - p2);
    return sgn(s1.z - s2.z);
}

// ---- closed forms ----

BlochVector gadc_bloch_evolve(const BlochVector& b0, const Gadc& c, double t) {
    const double a = c.a();
    const double u = std::exp(-a * c.gamma * t);
    const std::complex<double> minus(b0.x, -b0.y);
    const std::complex<double> rot = std::polar(std::sqrt(u), -2.0 * c.h_z * t);
    const auto m = minus * rot;
    return {m.real(), -m.imag(), -1.0 / a + (b0.z + 1.0 / a) * u};
}

double gadc_ergotropy(const BlochVector& b0, const Gadc& c, double t) {
    const GadcKernel k{c};
    return k.ergotropy(b0, k.at(t));
}

BlochVector pauli_bloch_evolve(const BlochVector& b0, const Pauli& c, double t) {
    const PauliKernel k{c};
    const auto f = k.at(t);
    const std::complex<double> minus(b0.x, -b0.y);
    const auto m = minus * std::polar(f.xd, -2.0 * c.h_z * t);
    return {m.real(), -m.imag(), b0.z * f.zd};
}

double pauli_ergotropy(const BlochVector& b0, const Pauli& c, double t) {
    if (b0.y != 0.0) fail(ErrorCategory::precondition, "pauli_ergotropy expects m_y = 0; rotate into the xz-plane first");
    const PauliKernel k{c};
    return k.ergotropy(b0, k.at(t));
}

QutritDiagonal qutrit_diagonal_evolve(const QutritDiagonal& q0, const QutritAdc& c, double t) {
    const double u = std::exp(-c.gamma * t);
    const double top = q0.p1 * u * u;
    return {top, (q0.p1 + q0.p2) * u - top};
}

std::complex<double> nm_amplitude(const NonMarkovAdc& c, double t) {
    using C = std::complex<double>;
    const C k0(c.lambda, -c.delta);
    const C zeta = std::sqrt(k0 * k0 - 2.0 * c.gamma * c.lambda);
    const C z = 0.5 * zeta * t;
    const double damp = 0.5 * c.lambda * t;
    if (std::abs(z) < 1e-6) return std::exp(-damp) * (1.0 + k0 * (0.5 * t));
    if (std::abs(z) < 1.0) {
        // sinh(z)/z is well conditioned here, and nothing can overflow
        return std::exp(-damp) * (std::cosh(z) + k0 * (0.5 * t) * (std::sinh(z) / z));
    }
    // split into growing/decaying exponentials so large t cannot overflow
    const C k = k0 / zeta;
    return 0.5 * (1.0 + k) * std::exp(z - damp) + 0.5 * (1.0 - k) * std::exp(-z - damp);
}

BlochVector nm_bloch_evolve(const BlochVector& b0, const NonMarkovAdc& c, double t) {
    const auto nu = nm_amplitude(c, t);
    const double q = std::norm(nu);
    const auto m = std::complex<double>(b0.x, -b0.y) * nu;
    return {m.real(), -m.imag(), q * (1.0 + b0.z) - 1.0};
}

double nm_ergotropy(const BlochVector& b0, const NonMarkovAdc& c, double t) {
    const NmKernel k{c};
    return k.ergotropy(b0, k.at(t));
}

DensityMatrix steady_state(const ChannelSpec& c) {
    validate(c);
    return std::visit(overloaded{
                          [](const Gadc& g) { return bloch_to_density({0.0, 0.0, -1.0 / g.a()}); },
                          [](const Pauli&) { return bloch_to_density({0.0, 0.0, 0.0}); },
                          [](const QutritAdc&) { return qutrit_to_density({0.0, 0.0}); },
                          [](const NonMarkovAdc&) { return bloch_to_density({0.0, 0.0, -1.0}); },
                      },
                      c);
}

namespace {

DensityMatrix bloch_checked(const BlochVector& b) {
    // propagation can push a pure state a few ulp outside the ball
    const double r = b.norm();
    if (r > 1.0 && r <= 1.0 + 1e-12) return bloch_to_density({b.x / r, b.y / r, b.z / r});
    return bloch_to_density(b);
}

DensityMatrix qutrit_closed_form(const DensityMatrix& rho0, const QutritAdc& c, double t) {
    const double g = c.gamma;
    const double u = std::exp(-g * t);
    const double p_top = rho0(0, 0).real();
    const double p_mid = rho0(1, 1).real();
    Matrix m(3, 3);
    m(0, 0) = p_top * u * u;
    m(1, 1) = (p_top + p_mid) * u - p_top * u * u;
    m(2, 2) = 1.0 - m(0, 0).real() - m(1, 1).real();
    const double rate[3] = {2.0 * g, g, 0.0};
    const double energy[3] = {c.h_z, 0.0, -c.h_z};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            if (i == j) continue;
            const std::complex<double> expo(-0.5 * (rate[i] + rate[j]) * t, -(energy[i] - energy[j]) * t);
            m(i, j) = rho0(i, j) * std::exp(expo);
        }
    return DensityMatrix::from_numerical(m);
}

} // namespace

DensityMatrix evolve_closed_form(const DensityMatrix& rho0, const ChannelSpec& c, double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) fail(ErrorCategory::domain, "evolution time must be finite and >= 0");
    if (rho0.dim() != channel_dim(c)) fail(ErrorCategory::dimension, "state dimension does not match channel");
    return std::visit(overloaded{
                          [&](const Gadc& g) { return bloch_checked(gadc_bloch_evolve(density_to_bloch(rho0), g, t)); },
                          [&](const Pauli& p) { return bloch_checked(pauli_bloch_evolve(density_to_bloch(rho0), p, t)); },
                          [&](const QutritAdc& q) { return qutrit_closed_form(rho0, q, t); },
                          [&](const NonMarkovAdc& n) { return bloch_checked(nm_bloch_evolve(density_to_bloch(rho0), n, t)); },
                      },
                      c);
}

} // namespace ergoflux
