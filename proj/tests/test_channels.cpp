#include <doctest.h>

#include <cmath>
#include <random>

#include "ergoflux/channels.hpp"
#include "ergoflux/ergotropy.hpp"
#include "ergoflux/error.hpp"
#include "oracles.hpp"

using namespace ergoflux;
using oracle::Jump;

namespace {

std::vector<Jump> gadc_jumps(const Gadc& g) {
    return {{oracle::unit(2, 1, 0), g.gamma * (1 + g.n_bose)}, {oracle::unit(2, 0, 1), g.gamma * g.n_bose}};
}

oracle::M hq(double h) { return h * oracle::pauli_z(); }

bool throws_physics(const ChannelSpec& c) {
    try {
        validate(c);
    } catch (const Error& e) {
        return e.category() == ErrorCategory::physics;
    }
    return false;
}

} // namespace

TEST_CASE("gadc closed form matches direct integration of the master equation") {
    std::mt19937_64 rng(11);
    for (double n : {0.0, 0.5, 2.0}) {
        const Gadc g{0.3, n, 0.7};
        for (int i = 0; i < 20; ++i) {
            const auto v = oracle::ball(rng);
            const double t = oracle::uniform(rng, 0.0, 6.0);
            const auto ref = oracle::rk4_lindblad(hq(g.h_z), gadc_jumps(g), oracle::bloch(v.x(), v.y(), v.z()), t, 4000);
            const auto got = evolve_closed_form(bloch_to_density({v.x(), v.y(), v.z()}), g, t);
            CHECK((got.matrix() - ref).norm() < 1e-11);
            CHECK(gadc_ergotropy({v.x(), v.y(), v.z()}, g, t) ==
                  doctest::Approx(oracle::ergotropy(ref, {g.h_z, -g.h_z})).epsilon(1e-10));
        }
    }
}

TEST_CASE("pauli closed form matches direct integration") {
    std::mt19937_64 rng(12);
    const Pauli p{0.2, 0.05, 1.0};
    const std::vector<Jump> jumps{{oracle::pauli_x(), p.gamma_perp}, {oracle::pauli_y(), p.gamma_perp}, {oracle::pauli_z(), p.gamma_z}};
    for (int i = 0; i < 20; ++i) {
        const auto v = oracle::ball(rng);
        const double t = oracle::uniform(rng, 0.0, 5.0);
        const auto ref = oracle::rk4_lindblad(hq(1.0), jumps, oracle::bloch(v.x(), v.y(), v.z()), t, 4000);
        CHECK((evolve_closed_form(bloch_to_density({v.x(), v.y(), v.z()}), p, t).matrix() - ref).norm() < 1e-11);
        const BlochVector b{v.x(), 0.0, v.z()};
        const auto ref0 = oracle::rk4_lindblad(hq(1.0), jumps, oracle::bloch(b.x, 0, b.z), t, 4000);
        CHECK(pauli_ergotropy(b, p, t) == doctest::Approx(oracle::ergotropy(ref0, {1.0, -1.0})).epsilon(1e-10));
    }
    CHECK_THROWS_AS(pauli_ergotropy({0.1, 0.2, 0.3}, p, 1.0), Error);
}

TEST_CASE("qutrit closed form including coherences matches direct integration") {
    const QutritAdc q{0.25, 0.8};
    const std::vector<Jump> jumps{{oracle::unit(3, 1, 0), q.gamma}, {oracle::unit(3, 2, 0), q.gamma}, {oracle::unit(3, 2, 1), q.gamma}};
    oracle::M h = oracle::M::Zero(3, 3);
    h(0, 0) = q.h_z;
    h(2, 2) = -q.h_z;
    Matrix rho0(3, 3);
    rho0 << 0.4, cplx(0.1, 0.1), cplx(0.05, -0.02), cplx(0.1, -0.1), 0.35, cplx(0.02, 0.03), cplx(0.05, 0.02),
        cplx(0.02, -0.03), 0.25;
    for (double t : {0.0, 0.5, 2.0, 7.5}) {
        const auto ref = oracle::rk4_lindblad(h, jumps, rho0, t, 6000);
        CHECK((evolve_closed_form(DensityMatrix::from_matrix(rho0), q, t).matrix() - ref).norm() < 1e-11);
    }
    const auto d = qutrit_diagonal_evolve({0.5, 0.3}, q, 1.3);
    const double u = std::exp(-q.gamma * 1.3);
    CHECK(d.p1 == doctest::Approx(0.5 * u * u));
    CHECK(d.p2 == doctest::Approx(0.8 * u - 0.5 * u * u));
}

TEST_CASE("memory-kernel amplitude matches an independent integration") {
    for (auto [g, l, dlt] : std::vector<std::tuple<double, double, double>>{
             {0.3, 0.03, 0.13}, {1.0, 0.03, 0.1}, {0.01, 1.0, 0.0}, {0.06, 0.03, 0.0}, {2.0, 0.5, -0.4}}) {
        const NonMarkovAdc c{g, l, dlt, 1.0};
        for (double t : {0.0, 1e-8, 0.3, 2.0, 17.0, 60.0}) {
            const auto ref = oracle::nu_rk4(g, l, dlt, t, 20000);
            const auto nu = nm_amplitude(c, t);
            // the closed form lives in a frame turning at delta/2 relative to the kernel equation
            CHECK(std::abs(std::abs(nu) - std::abs(ref)) < 1e-10);
            CHECK(std::abs(nu * std::polar(1.0, 0.5 * dlt * t) - ref) < 1e-10);
        }
    }
    // critical point: zeta = 0 exactly (delta = 0, gamma = lambda / 2)
    const NonMarkovAdc crit{0.5, 1.0, 0.0, 1.0};
    for (double t : {0.5, 3.0, 10.0}) CHECK(std::abs(nm_amplitude(crit, t) - oracle::nu_rk4(0.5, 1.0, 0.0, t, 20000)) < 1e-10);
    // no overflow far out
    const NonMarkovAdc weak{0.01, 1.0, 0.0, 1.0};
    CHECK(std::isfinite(std::abs(nm_amplitude(weak, 1e5))));
}

TEST_CASE("non-Markovian Bloch evolution follows the amplitude") {
    const NonMarkovAdc c{1.0, 0.03, 0.1, 1.0};
    const BlochVector b{0.4, 0.2, 0.5};
    for (double t : {0.5, 4.0, 30.0}) {
        const auto nu = nm_amplitude(c, t);
        const auto r = nm_bloch_evolve(b, c, t);
        CHECK(r.z == doctest::Approx(std::norm(nu) * (1 + b.z) - 1).epsilon(1e-13));
        CHECK(r.transverse() == doctest::Approx(std::abs(nu) * b.transverse()).epsilon(1e-13));
        const auto rho = evolve_closed_form(bloch_to_density(b), c, t);
        CHECK(std::abs(rho(0, 1) - nu * bloch_to_density(b)(0, 1)) < 1e-14);
        CHECK(nm_ergotropy(b, c, t) == doctest::Approx(oracle::ergotropy(rho.matrix(), {1.0, -1.0})).epsilon(1e-12));
    }
}

TEST_CASE("kernels agree with the closed forms") {
    std::mt19937_64 rng(5);
    const GadcKernel gk{{0.1, 0.5, 1.0}};
    const PauliKernel pk{{0.01, 0.001, 1.0}};
    const NmKernel nk{{0.3, 0.03, 0.13, 1.0}};
    for (int i = 0; i < 100; ++i) {
        const auto v = oracle::ball(rng, true);
        const BlochVector b{v.x(), 0.0, v.z()};
        const double t = oracle::uniform(rng, 0, 50);
        const auto ss_g = steady_state(gk.c);
        CHECK(gk.ergotropy(b, gk.at(t)) == doctest::Approx(gadc_ergotropy(b, gk.c, t)).epsilon(1e-13));
        CHECK(gk.distance(b, gk.at(t)) ==
              doctest::Approx(trace_distance(evolve_closed_form(bloch_to_density(b), gk.c, t), ss_g)).epsilon(1e-12));
        CHECK(pk.ergotropy(b, pk.at(t)) == doctest::Approx(pauli_ergotropy(b, pk.c, t)).epsilon(1e-13));
        CHECK(nk.ergotropy(b, nk.at(t)) == doctest::Approx(nm_ergotropy(b, nk.c, t)).epsilon(1e-13));
    }
    const QutritKernel qk{{0.1, 1.0}};
    const QutritDiagonal d{0.481, 0.103};
    for (double t : {0.0, 1.0, 10.0}) {
        const auto e = qk.ergotropy(d, qk.at(t));
        CHECK(e == doctest::Approx(ergotropy(evolve_closed_form(qutrit_to_density(d), qk.c, t), hamiltonian(qk.c))).epsilon(1e-12));
    }
}

TEST_CASE("stable ergotropy form has no cancellation") {
    // x < 0 with tiny y: naive x + sqrt(x^2 + y) loses every digit
    const double x = -1.0, y = 1e-20;
    CHECK(ergo_form(x, y) == doctest::Approx(0.5e-20).epsilon(1e-12));
    CHECK(ergo_form(0.0, 0.0) == 0.0);
    CHECK(ergo_form(2.0, 0.0) == 4.0);
}

TEST_CASE("steady states, rates and horizons") {
    const Gadc g{0.1, 0.5, 1.0};
    CHECK(density_to_bloch(steady_state(g)).z == doctest::Approx(-0.5));
    CHECK(slowest_rate(g) == doctest::Approx(0.1));
    CHECK(default_horizon(g) == doctest::Approx(1000.0));
    CHECK(slowest_rate(Pauli{0.01, 0.001, 1.0}) == doctest::Approx(0.022));
    CHECK(slowest_rate(Pauli{0.0, 0.01, 1.0}) == doctest::Approx(0.02));
    CHECK(slowest_rate(QutritAdc{0.1, 1.0}) == doctest::Approx(0.05));
    CHECK(default_horizon(NonMarkovAdc{0.3, 0.03, 0.13, 1.0}) == doctest::Approx(20.0 / 0.03));
    CHECK(bose_occupation(0.0, 1.0) == 0.0);
    CHECK(bose_occupation(2.0, 1.0) == doctest::Approx(1.0 / (std::exp(1.0) - 1.0)));
}

TEST_CASE("validation rejects unphysical parameters") {
    CHECK(throws_physics(Gadc{-0.1, 0.0, 1.0}));
    CHECK(throws_physics(Gadc{0.1, -1.0, 1.0}));
    CHECK(throws_physics(Pauli{0.1, -0.1, 1.0}));
    CHECK(throws_physics(NonMarkovAdc{0.3, 0.0, 0.0, 1.0}));
    CHECK(throws_physics(QutritAdc{0.1, 0.0}));
    CHECK_FALSE(throws_physics(Gadc{0.1, 0.0, 1.0}));
}
