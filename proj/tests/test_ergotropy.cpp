#include <doctest.h>

#include <cmath>
#include <random>

#include "ergoflux/channels.hpp"
#include "ergoflux/error.hpp"
#include "ergoflux/ergotropy.hpp"
#include "oracles.hpp"

using namespace ergoflux;

TEST_CASE("qubit ergotropy: closed form, brute force and the general routine agree") {
    std::mt19937_64 rng(21);
    const auto h = BatteryHamiltonian::qubit(0.8);
    for (int i = 0; i < 500; ++i) {
        const auto v = oracle::ball(rng);
        const BlochVector b{v.x(), v.y(), v.z()};
        const double brute = oracle::ergotropy(oracle::bloch(b.x, b.y, b.z), {0.8, -0.8});
        CHECK(qubit_ergotropy(b, 0.8) == doctest::Approx(brute).epsilon(1e-12));
        CHECK(ergotropy(bloch_to_density(b), h) == doctest::Approx(brute).epsilon(1e-12));
    }
}

TEST_CASE("ergotropy properties") {
    std::mt19937_64 rng(22);
    const auto h = BatteryHamiltonian::qutrit(1.0);
    for (int i = 0; i < 200; ++i) {
        // random qutrit state from a Gram matrix
        Matrix a(3, 3);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) a(r, c) = cplx(oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1));
        Matrix m = a * a.adjoint();
        m /= m.trace().real();
        const auto rho = DensityMatrix::from_matrix(m);
        const auto bd = ergotropy_breakdown(rho, h);
        CHECK(bd.total >= 0.0);
        CHECK(bd.incoherent >= 0.0);
        CHECK(bd.coherent >= -1e-15);
        CHECK(bd.total == doctest::Approx(bd.incoherent + bd.coherent));
        CHECK(bd.total == doctest::Approx(oracle::ergotropy(m, {1.0, 0.0, -1.0})).epsilon(1e-12));
        // the passive state has no ergotropy and the same spectrum
        const auto p = passive_state(rho, h);
        CHECK(ergotropy(p, h) < 1e-14);
        CHECK((eigen_sorted(p).values - eigen_sorted(rho).values).norm() < 1e-13);
        // unitary invariance of the spectrum bounds: ergotropy <= Tr(rho H) - E_min
        CHECK(bd.total <= (m * h.matrix()).trace().real() + 1.0 + 1e-12);
    }
}

TEST_CASE("dephasing keeps populations only") {
    const auto rho = bloch_to_density({0.5, 0.2, 0.3});
    const auto d = density_to_bloch(dephase(rho, BatteryHamiltonian::qubit(1.0)));
    CHECK(d.x == 0.0);
    CHECK(d.y == 0.0);
    CHECK(d.z == doctest::Approx(0.3));
}

TEST_CASE("incoherent ergotropy of the gadc at zero temperature") {
    std::mt19937_64 rng(23);
    const Gadc g{0.1, 0.0, 1.0};
    const auto h = hamiltonian(g);
    for (int i = 0; i < 100; ++i) {
        const auto v = oracle::ball(rng, true);
        const BlochVector b{v.x(), 0.0, v.z()};
        const double ts = incoherent_vanish_time(b.z, g);
        if (b.z > 0) {
            CHECK(ts == doctest::Approx(std::log1p(b.z) / 0.1).epsilon(1e-14));
            CHECK(std::abs(gadc_bloch_evolve(b, g, ts).z) < 1e-14);
        } else {
            CHECK(ts == 0.0);
        }
        for (double t : {0.0, 0.5 * ts, ts, 2 * ts + 1}) {
            const auto bt = gadc_bloch_evolve(b, g, t);
            const auto bd = ergotropy_breakdown(bloch_to_density(bt), h);
            CHECK(bd.incoherent == doctest::Approx(2.0 * std::max(0.0, bt.z)).epsilon(1e-12));
        }
    }
}

TEST_CASE("isoergotropic paraboloid") {
    for (double e0 : {0.2, 0.9, 1.5}) {
        for (double mz : {e0 - 1 + 0.01, 0.0, e0 / 2 - 0.01}) {
            if (mz < e0 - 1 || mz > e0 / 2) continue;
            const double mx = iso_ergotropic_mx(e0, mz);
            CHECK(mx >= 0.0);
            CHECK(qubit_ergotropy({mx, 0, mz}, 1.0) == doctest::Approx(e0).epsilon(1e-12));
        }
    }
}

TEST_CASE("qutrit ergotropy table over the simplex") {
    const int n = 200;
    double worst = 0.0;
    const auto h = BatteryHamiltonian::qutrit(1.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const QutritDiagonal q{i / double(n - 1), j / double(n - 1)};
            if (!q.valid()) continue;
            const QutritDiagonal qc{q.p1, q.p2 > 1 - q.p1 ? 1 - q.p1 : q.p2};
            worst = std::max(worst, std::abs(qutrit_table_ergotropy(qc, 1.0) - ergotropy(qutrit_to_density(qc), h)));
        }
    CHECK(worst < 1e-12);
    CHECK(qutrit_table_ergotropy({0.481, 0.103}, 1.0) == doctest::Approx(0.443).epsilon(1e-13));
    CHECK(qutrit_table_ergotropy({0.0, 0.0}, 2.0) == 0.0);
    CHECK(qutrit_table_ergotropy({1.0, 0.0}, 2.0) == doctest::Approx(4.0));
}
