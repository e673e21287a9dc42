#include <doctest.h>

#include <cmath>

#include "ergoflux/crossing.hpp"
#include "ergoflux/error.hpp"

using namespace ergoflux;

namespace {

CrossingReport detect(std::function<double(double)> d, double t_max, const CrossingOptions& opt = {}) {
    return detect_crossings(d, [](double) { return 0.0; }, t_max, 1e-13 * t_max, opt);
}

} // namespace

TEST_CASE("simple sign changes are found and refined") {
    const auto r = detect([](double t) { return std::cos(t); }, 10.0);
    REQUIRE(r.count == 3);
    CHECK(r.crossing_times[0] == doctest::Approx(M_PI / 2).epsilon(1e-12));
    CHECK(r.crossing_times[1] == doctest::Approx(3 * M_PI / 2).epsilon(1e-12));
    CHECK(r.crossing_times[2] == doctest::Approx(5 * M_PI / 2).epsilon(1e-12));
    CHECK(r.parity == Parity::odd);
    CHECK(r.event_times == r.crossing_times);
}

TEST_CASE("parity names") {
    CHECK(parity_of(0) == Parity::zero);
    CHECK(parity_of(2) == Parity::even);
    CHECK(parity_name(parity_of(5)) == "odd");
}

TEST_CASE("grid doubles until two successive grids agree") {
    // roots 0.02 apart: caught on the starting grid, confirmed on the first doubling
    const auto r = detect([](double t) { return (t - 3.0) * (t - 3.02); }, 10.0);
    CHECK(r.count == 2);
    CHECK(r.grid_intervals == 4096);
    CHECK(r.crossing_times[0] == doctest::Approx(3.0).epsilon(1e-11));
    CHECK(r.crossing_times[1] == doctest::Approx(3.02).epsilon(1e-11));
    // a pair missed by the 2048 grid but caught at 4096 keeps refining until stable
    const double h = 10.0 / 2048;
    const double a0 = 600 * h + 0.2 * h, a1 = 600 * h + 0.8 * h;
    const auto r2 = detect([&](double t) { return (t - a0) * (t - a1); }, 10.0);
    CHECK(r2.count == 2);
    CHECK(r2.grid_intervals == 8192);
}

TEST_CASE("a touch is flagged, not counted") {
    // (t-2)^2 touches zero at a grid point
    const auto r = detect([](double t) { return (t - 2.0) * (t - 2.0); }, 4.0);
    CHECK(r.count == 0);
    CHECK(r.parity == Parity::zero);
    REQUIRE(r.event_times.size() == 1);
    CHECK(r.tangency_flags[0]);
    CHECK(r.event_times[0] == doctest::Approx(2.0));
}

TEST_CASE("a run of exact zeros between opposite signs is one crossing") {
    const auto f = [](double t) { return t < 1.0 ? 1.0 : (t <= 2.0 ? 0.0 : -1.0); };
    const auto r = detect(f, 4.0);
    CHECK(r.count == 1);
    CHECK(r.crossing_times[0] >= 1.0);
    CHECK(r.crossing_times[0] <= 2.0 + 1e-3);
}

TEST_CASE("a run of exact zeros between equal signs is a touch") {
    // curves meet on [1, 2] then separate in the original order
    const auto f = [](double t) { return t < 1.0 ? 1.0 - t : (t <= 2.0 ? 0.0 : t - 2.0); };
    const auto r = detect(f, 4.0);
    CHECK(r.count == 0);
    REQUIRE(r.tangency_flags.size() == 1);
    CHECK(r.tangency_flags[0]);
}

TEST_CASE("curves ending on top of each other do not produce a crossing") {
    // decays to exactly zero and stays there, like two passive trajectories
    const auto r = detect([](double t) { return t < 1.0 ? 1.0 - t : 0.0; }, 4.0);
    CHECK(r.count == 0);
    CHECK(r.event_times.empty());
}

TEST_CASE("equal starting values are an ordering error") {
    try {
        detect([](double t) { return t; }, 1.0);
        FAIL("expected an ordering error");
    } catch (const Error& e) {
        CHECK(e.category() == ErrorCategory::ordering);
    }
    CHECK_THROWS_AS(detect([](double t) { return 1 + t; }, -1.0), Error);
}

TEST_CASE("lower-on-top fraction") {
    using detail::lower_on_top_fraction;
    CHECK(lower_on_top_fraction({1, 1, 1}) == 0.0);
    // equal areas either side of a crossing at the midpoint
    CHECK(lower_on_top_fraction({1, 0, -1}) == doctest::Approx(0.5));
    CHECK(lower_on_top_fraction({-1, 0, 1}) == doctest::Approx(0.5));
    // crossing split by a linear zero inside the interval
    CHECK(lower_on_top_fraction({1, -3}) == doctest::Approx(9.0 / 10.0));
    CHECK(lower_on_top_fraction({0, 0}) == 0.0);
    const auto r = detect([](double t) { return std::cos(t); }, M_PI);
    CHECK(r.mpemba_parameter == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("scan_samples brackets") {
    const auto s = detail::scan_samples({1, 0, 0, -1, -2, 0, 3}, 1e-12);
    REQUIRE(s.brackets.size() == 2);
    CHECK(s.brackets[0] == std::pair<std::size_t, std::size_t>{0, 3});
    CHECK(s.brackets[1] == std::pair<std::size_t, std::size_t>{4, 6});
    CHECK(s.touches.empty());
    const auto near = detail::scan_samples({1, 1e-13, 1}, 1e-12);
    REQUIRE(near.touches.size() == 1);
    CHECK(near.touches[0] == 1);
}

TEST_CASE("differences below rounding are exact zeros") {
    CHECK(resolved_difference(1.0, 1.0 + 1e-15) == 0.0);
    CHECK(resolved_difference(1e-300, 1.000000000001e-300) != 0.0);
    CHECK(resolved_difference(2.0, 1.0) == 1.0);
    // two curves equal up to rounding late on: no spurious crossings
    const auto noisy = [](double t) { return std::exp(-t) * (1.0 + (std::fmod(t * 977.0, 1.0) < 0.5 ? 1e-15 : -1e-15)); };
    const auto r = detect_crossings([](double t) { return std::exp(-t) * (1.0 + 1e-3 * std::exp(-t)); }, noisy, 40.0, 1e-12);
    CHECK(r.count == 0);
    CHECK(r.final_sign == 1);
}
