#include "ergoflux/mpemba.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ergoflux/ergotropy.hpp"
#include "ergoflux/error.hpp"

namespace ergoflux {

namespace {

constexpr double kEqualTol = 1e-12;

bool is_diagonal(const DensityMatrix& rho) {
    for (int i = 0; i < rho.dim(); ++i)
        for (int j = 0; j < rho.dim(); ++j)
            if (i != j && rho(i, j) != cplx(0.0, 0.0)) return false;
    return true;
}

} // namespace

double unit_uniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

Trajectory trajectory(const DensityMatrix& rho0, const ChannelSpec& c, double t_max, std::size_t n_points) {
    if (n_points < 2) fail(ErrorCategory::domain, "trajectory needs at least two points");
    if (!(t_max > 0.0) || !std::isfinite(t_max)) fail(ErrorCategory::domain, "trajectory horizon must be positive");
    validate(c);
    if (rho0.dim() != channel_dim(c)) fail(ErrorCategory::dimension, "state dimension does not match channel");
    const auto h = hamiltonian(c);
    const auto ss = steady_state(c);
    Trajectory tr;
    tr.times.reserve(n_points);
    for (std::size_t k = 0; k < n_points; ++k) {
        const double t = t_max * (static_cast<double>(k) / static_cast<double>(n_points - 1));
        const auto rho = evolve_closed_form(rho0, c, t);
        const auto b = ergotropy_breakdown(rho, h);
        tr.times.push_back(t);
        tr.ergotropy_total.push_back(b.total);
        tr.ergotropy_incoherent.push_back(b.incoherent);
        tr.ergotropy_coherent.push_back(b.coherent);
        tr.trace_distance_to_ss.push_back(trace_distance(rho, ss));
    }
    return tr;
}

Curve::Curve(const DensityMatrix& rho0, const ChannelSpec& c)
    : c_(c), rho0_(rho0), ss_(steady_state(c)), h_(hamiltonian(c)) {
    if (rho0.dim() != channel_dim(c)) fail(ErrorCategory::dimension, "state dimension does not match channel");
    if (rho0.dim() == 2)
        bloch_ = density_to_bloch(rho0);
    else if (is_diagonal(rho0))
        diag_ = QutritDiagonal{rho0(0, 0).real(), rho0(1, 1).real()};
}

double Curve::ergotropy(double t) const {
    if (const auto* g = std::get_if<Gadc>(&c_)) return gadc_ergotropy(bloch_, *g, t);
    if (const auto* p = std::get_if<Pauli>(&c_)) {
        const PauliKernel k{*p};
        return k.ergotropy(bloch_, k.at(t));
    }
    if (const auto* n = std::get_if<NonMarkovAdc>(&c_)) return nm_ergotropy(bloch_, *n, t);
    const auto& q = std::get<QutritAdc>(c_);
    if (diag_) {
        const QutritKernel k{q};
        return k.ergotropy(*diag_, k.at(t));
    }
    return ergoflux::ergotropy(evolve_closed_form(rho0_, c_, t), h_);
}

double Curve::distance(double t) const {
    if (const auto* g = std::get_if<Gadc>(&c_)) {
        const GadcKernel k{*g};
        return k.distance(bloch_, k.at(t));
    }
    if (const auto* p = std::get_if<Pauli>(&c_)) {
        const PauliKernel k{*p};
        return k.distance(bloch_, k.at(t));
    }
    if (const auto* n = std::get_if<NonMarkovAdc>(&c_)) {
        const NmKernel k{*n};
        return k.distance(bloch_, k.at(t));
    }
    const auto& q = std::get<QutritAdc>(c_);
    if (diag_) {
        const QutritKernel k{q};
        return k.distance(*diag_, k.at(t));
    }
    return trace_distance(evolve_closed_form(rho0_, c_, t), ss_);
}

namespace {

template <class Fn>
CrossingReport pair_crossings(const Curve& c1, const Curve& c2, Fn fn, double t_max, double refine_tol) {
    if (refine_tol <= 0.0) refine_tol = 1e-13 * t_max;
    return detect_crossings([&](double t) { return fn(c1, t); }, [&](double t) { return fn(c2, t); }, t_max, refine_tol);
}

} // namespace

CrossingReport ergotropic_crossings(const DensityMatrix& rho1, const DensityMatrix& rho2, const ChannelSpec& c,
                                    double t_max, double refine_tol) {
    validate(c);
    const Curve a(rho1, c), b(rho2, c);
    return pair_crossings(a, b, [](const Curve& cv, double t) { return cv.ergotropy(t); }, t_max, refine_tol);
}

CrossingReport state_mpemba_crossings(const DensityMatrix& rho1, const DensityMatrix& rho2, const ChannelSpec& c,
                                      double t_max, double refine_tol) {
    validate(c);
    const Curve a(rho1, c), b(rho2, c);
    return pair_crossings(a, b, [](const Curve& cv, double t) { return cv.distance(t); }, t_max, refine_tol);
}

std::string_view kind_name(PureCrossingTime::Kind k) {
    switch (k) {
    case PureCrossingTime::Kind::finite: return "finite";
    case PureCrossingTime::Kind::divergent: return "divergent";
    case PureCrossingTime::Kind::degenerate: return "degenerate";
    }
    return "divergent";
}

PureCrossingTime crossing_time_pure_gadc(double theta1, double theta2, const Gadc& c) {
    constexpr double pi = std::numbers::pi;
    if (!(theta1 >= 0.0 && theta1 <= pi && theta2 >= 0.0 && theta2 <= pi))
        fail(ErrorCategory::domain, "polar angles must lie in [0, pi]");
    validate(c);
    if (theta1 == theta2) return {PureCrossingTime::Kind::degenerate, 0.0};
    const double c1 = std::cos(theta1), c2 = std::cos(theta2);
    const double s = c1 + c2;
    if (!(s > 0.0) || c.gamma == 0.0) return {PureCrossingTime::Kind::divergent, 0.0};
    const double a = c.a();
    const double arg = 4.0 * (a * (1.0 + c1 * c2) + s) / (s * (4.0 + a * s));
    return {PureCrossingTime::Kind::finite, std::log(arg) / (a * c.gamma)};
}

double mpemba_parameter(const Trajectory& traj1, const Trajectory& traj2) {
    const auto& t = traj1.times;
    if (t.size() < 2 || t != traj2.times || traj1.ergotropy_total.size() != t.size() ||
        traj2.ergotropy_total.size() != t.size())
        fail(ErrorCategory::domain, "mpemba_parameter needs trajectories on one shared grid");
    const auto& e1 = traj1.ergotropy_total;
    const auto& e2 = traj2.ergotropy_total;
    if (!(e1[0] - e2[0] > kEqualTol))
        fail(ErrorCategory::ordering, "mpemba_parameter expects the first trajectory to start with strictly higher ergotropy");
    // t_f: from here on both curves stay negligible
    const double thr = 1e-6 * std::max(e1[0], e2[0]);
    std::size_t last = 0;
    for (std::size_t k = 0; k < t.size(); ++k)
        if (e1[k] > thr || e2[k] > thr) last = k;
    const std::size_t end = std::min(last + 1, t.size() - 1);
    double pos = 0.0, neg = 0.0;
    for (std::size_t k = 0; k < end; ++k) {
        const double h = t[k + 1] - t[k];
        const double a = e1[k] - e2[k], b = e1[k + 1] - e2[k + 1];
        if (a >= 0.0 && b >= 0.0) {
            pos += 0.5 * h * (a + b);
        } else if (a <= 0.0 && b <= 0.0) {
            neg -= 0.5 * h * (a + b);
        } else {
            const double f = a / (a - b);
            if (a > 0.0) {
                pos += 0.5 * h * a * f;
                neg -= 0.5 * h * b * (1.0 - f);
            } else {
                neg -= 0.5 * h * a * f;
                pos += 0.5 * h * b * (1.0 - f);
            }
        }
    }
    const double total = pos + neg;
    return total > 0.0 ? neg / total : 0.0;
}

std::string_view prediction_name(EmcPrediction p) {
    switch (p) {
    case EmcPrediction::no_crossing: return "no_crossing";
    case EmcPrediction::crossing: return "crossing";
    case EmcPrediction::not_covered: return "not_covered";
    }
    return "not_covered";
}

EmcPrediction predict_emc_gadc(const BlochVector& b1_in, const BlochVector& b2_in) {
    if (!b1_in.in_ball() || !b2_in.in_ball()) fail(ErrorCategory::domain, "Bloch vector outside the unit ball");
    BlochVector b1 = b1_in, b2 = b2_in;
    double e1 = qubit_ergotropy(b1, 1.0), e2 = qubit_ergotropy(b2, 1.0);
    if (e1 < e2) {
        std::swap(b1, b2);
        std::swap(e1, e2);
    }
    const double c1 = b1.transverse(), c2 = b2.transverse();
    if (e1 - e2 <= kEqualTol) {
        // equal ergotropy and coherence means equal m_z: identical curves
        return c1 == c2 ? EmcPrediction::no_crossing : EmcPrediction::not_covered;
    }
    return c1 >= c2 ? EmcPrediction::no_crossing : EmcPrediction::crossing;
}

EmcPrediction predict_emc_pauli(const BlochVector& b1, const BlochVector& b2, const Pauli& c) {
    validate(c);
    if (b1.y != 0.0 || b2.y != 0.0) fail(ErrorCategory::ordering, "predict_emc_pauli expects states in the xz-plane");
    if (!(b1.z > 0.0) || !(b2.z > 0.0)) fail(ErrorCategory::ordering, "predict_emc_pauli expects m_z > 0 for both states");
    if (!(qubit_ergotropy(b1, c.h_z) > qubit_ergotropy(b2, c.h_z)))
        fail(ErrorCategory::ordering, "predict_emc_pauli expects the first state to have higher ergotropy");
    if (c.gamma_perp == c.gamma_z) return EmcPrediction::no_crossing;
    if (c.gamma_perp < c.gamma_z) {
        // populations outlive coherences: the mean energy decides
        if (b1.z == b2.z) return EmcPrediction::not_covered;
        return b1.z < b2.z ? EmcPrediction::crossing : EmcPrediction::no_crossing;
    }
    const double c1 = std::abs(b1.x), c2 = std::abs(b2.x);
    if (c1 == c2) return EmcPrediction::not_covered;
    return c1 < c2 ? EmcPrediction::crossing : EmcPrediction::no_crossing;
}

std::string_view lemma_name(Lemma l) {
    switch (l) {
    case Lemma::L1: return "L1";
    case Lemma::L2: return "L2";
    case Lemma::L3: return "L3";
    case Lemma::L4: return "L4";
    }
    return "L1";
}

namespace {

// F(x2, y2) - F(x1, y1) for F = x + sqrt(x^2 + y), given dx = x2 - x1 and dy = y2 - y1
// exactly. Uses F1 + F2 and R1 + R2 only, so nothing cancels even when both
// values are tiny.
double ergo_form_difference(double x1, double y1, double x2, double y2, double dx, double dy) {
    const double f1 = ergo_form(x1, y1), f2 = ergo_form(x2, y2);
    const double r = std::sqrt(x1 * x1 + y1) + std::sqrt(x2 * x2 + y2);
    if (r == 0.0) return 0.0;
    return (dx * (f1 + f2) + dy) / r;
}

} // namespace

LemmaReport verify_lemma_monotonicity(Lemma lemma, std::size_t samples, const ChannelSpec& c, std::uint64_t seed) {
    validate(c);
    const bool markov_lemma = lemma == Lemma::L1 || lemma == Lemma::L2;
    if (markov_lemma && !std::holds_alternative<Gadc>(c))
        fail(ErrorCategory::precondition, "lemmas L1 and L2 are checked on the GADC");
    if (!markov_lemma && !std::holds_alternative<NonMarkovAdc>(c))
        fail(ErrorCategory::precondition, "lemmas L3 and L4 are checked on the Lorentzian-bath channel");
    const bool iso = lemma == Lemma::L1 || lemma == Lemma::L3;

    // E(t) = (h_z / a) F(r (1 + a m_z) - 1, a^2 r m_perp^2) with r = u (GADC) or |nu|^2
    double a = 1.0, h_z = 1.0, horizon = 0.0;
    std::function<double(double)> factor;
    if (const auto* g = std::get_if<Gadc>(&c)) {
        if (g->gamma == 0.0) fail(ErrorCategory::domain, "lemma check needs a nonzero decay rate");
        a = g->a();
        h_z = g->h_z;
        horizon = 20.0 / (a * g->gamma);
        factor = [gc = *g](double t) { return std::exp(-gc.a() * gc.gamma * t); };
    } else {
        const auto& n = std::get<NonMarkovAdc>(c);
        h_z = n.h_z;
        horizon = 20.0 / n.lambda;
        factor = [n](double t) { return std::norm(nm_amplitude(n, t)); };
    }

    constexpr double step = 1e-6;
    constexpr double margin = 1e-4;
    std::mt19937_64 rng(seed);
    auto uni = [&] { return unit_uniform(rng()); };

    LemmaReport rep;
    rep.lemma = lemma;
    rep.samples = samples;
    for (std::size_t i = 0; i < samples; ++i) {
        double mx, mz, dperp2;
        if (iso) {
            // ergotropy level e0, then m_z along the paraboloid inside the ball
            const double e0 = 0.01 + 1.98 * uni();
            const double lo = e0 - 1.0 + margin, hi = 0.5 * e0 - margin;
            mz = lo + (hi - lo) * uni();
            mx = iso_ergotropic_mx(e0, mz);
            dperp2 = -4.0 * e0 * step; // m_x^2 = e0^2 - 2 e0 m_z
        } else {
            // every tenth sample sits on the coherence-free line
            mx = (i % 10 == 9) ? 0.0 : -1.0 + 2.0 * uni();
            const double zmax = std::sqrt(std::max(0.0, 1.0 - mx * mx)) - margin;
            mz = -zmax + 2.0 * zmax * uni();
            dperp2 = 0.0;
        }
        const double t = horizon * (1.0 - uni()); // (0, horizon]
        const double r = factor(t);
        const double p2 = mx * mx;
        const double x1 = r * (1.0 + a * (mz - step)) - 1.0;
        const double x2 = r * (1.0 + a * (mz + step)) - 1.0;
        const double y1 = a * a * r * (p2 - 0.5 * dperp2);
        const double y2 = a * a * r * (p2 + 0.5 * dperp2);
        const double diff = ergo_form_difference(x1, y1, x2, y2, r * a * 2.0 * step, a * a * r * dperp2);
        const double deriv = h_z / a * diff / (2.0 * step);
        bool bad;
        if (iso)
            bad = !(deriv < 0.0);
        else
            bad = mx == 0.0 ? deriv < 0.0 : !(deriv > 0.0);
        if (bad) {
            ++rep.violations;
            if (rep.violation_samples.size() < 20) rep.violation_samples.push_back({{mx, 0.0, mz}, t, deriv});
        }
    }
    return rep;
}

} // namespace ergoflux
