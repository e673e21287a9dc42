#pragma once

#include <algorithm>

#include <cmath>
#include <cstddef>
#include <functional>
#include <string_view>
#include <vector>

#include "ergoflux/error.hpp"

namespace ergoflux {

enum class Parity { zero, odd, even };
std::string_view parity_name(Parity p);
Parity parity_of(std::size_t count);

struct CrossingReport {
    std::vector<double> crossing_times; // ascending, each refined by bisection
    std::size_t count = 0;
    Parity parity = Parity::zero;
    // fraction of the area between the curves where the initially lower one is on top
    double mpemba_parameter = 0.0;
    // crossings and tangential touches merged in time order; flag true marks a touch
    std::vector<double> event_times;
    std::vector<bool> tangency_flags;
    std::size_t grid_intervals = 0;
    // set when the final asymptotic check adds a crossing past the horizon
    bool beyond_horizon = false;
    // sign of the last sample that resolved the ordering (0 if none did)
    int final_sign = 0;
};

// Below this fraction of the curves' own size a difference is rounding noise.
inline constexpr double kResolveRel = 1e-13;

// f - g, or exactly 0 when the ordering is not resolvable in double precision
inline double resolved_difference(double f, double g) {
    const double d = f - g;
    return std::abs(d) <= kResolveRel * std::max(std::abs(f), std::abs(g)) ? 0.0 : d;
}

struct CrossingOptions {
    std::size_t initial_intervals = 2048;
    std::size_t max_intervals = std::size_t{1} << 20;
    double tangency_tol = 1e-12;
    double ordering_tol = 1e-12;
};

namespace detail {

struct SampleScan {
    // pairs of sample indices (i, j), j > i, with opposite nonzero signs and only zeros between
    std::vector<std::pair<std::size_t, std::size_t>> brackets;
    std::vector<std::size_t> touches; // sample index of each tangential touch
};

SampleScan scan_samples(const std::vector<double>& d, double tangency_tol);

// oriented trapezoid areas, segments split at linear zeros
double lower_on_top_fraction(const std::vector<double>& d);

double bisect(const std::function<double(double)>& diff, double lo, double hi, double d_lo, double tol);

void add_event(CrossingReport& r, double t, bool touch);

} // namespace detail

// Core detector for d(t) = f(t) - g(t) on (0, t_max]. sample(k, n) must return d at
// t = t_max * k / n (callers can serve it from precomputed tables); eval(t) is used
// for bisection. The grid starts at opt.initial_intervals and is doubled until the
// number of sign changes agrees between two successive grids.
template <class SampleFn, class EvalFn>
CrossingReport detect_crossings_sampled(SampleFn&& sample, EvalFn&& eval, double t_max, double refine_tol,
                                        const CrossingOptions& opt = {}) {
    if (!(t_max > 0.0) || !std::isfinite(t_max)) fail(ErrorCategory::domain, "crossing horizon must be positive");
    if (!(refine_tol > 0.0)) fail(ErrorCategory::domain, "refine_tol must be positive");

    std::size_t n = opt.initial_intervals;
    std::vector<double> d(n + 1);
    for (std::size_t k = 0; k <= n; ++k) d[k] = sample(k, n);
    if (!(std::abs(d[0]) > opt.ordering_tol)) fail(ErrorCategory::ordering, "curves start equal: initial ordering is ambiguous");

    auto scan = detail::scan_samples(d, opt.tangency_tol);
    while (2 * n <= opt.max_intervals) {
        std::vector<double> finer(2 * n + 1);
        for (std::size_t k = 0; k <= n; ++k) finer[2 * k] = d[k];
        for (std::size_t k = 0; k < n; ++k) finer[2 * k + 1] = sample(2 * k + 1, 2 * n);
        auto scan2 = detail::scan_samples(finer, opt.tangency_tol);
        const bool stable = scan2.brackets.size() == scan.brackets.size();
        d.swap(finer);
        scan = std::move(scan2);
        n *= 2;
        if (stable) break;
    }

    CrossingReport r;
    r.grid_intervals = n;
    const double h = t_max / static_cast<double>(n);
    std::function<double(double)> ev = eval;
    for (const auto& [i, j] : scan.brackets) {
        const double lo = t_max * (static_cast<double>(i) / static_cast<double>(n));
        const double hi = t_max * (static_cast<double>(j) / static_cast<double>(n));
        double t;
        if (j == i + 2 && d[i + 1] == 0.0)
            t = t_max * (static_cast<double>(i + 1) / static_cast<double>(n));
        else
            t = detail::bisect(ev, lo, hi, d[i], refine_tol);
        r.crossing_times.push_back(t);
        detail::add_event(r, t, false);
    }
    for (auto k : scan.touches) detail::add_event(r, static_cast<double>(k) * h, true);
    r.count = r.crossing_times.size();
    r.parity = parity_of(r.count);
    r.mpemba_parameter = detail::lower_on_top_fraction(d);
    for (auto it = d.rbegin(); it != d.rend(); ++it)
        if (*it != 0.0) {
            r.final_sign = *it > 0.0 ? 1 : -1;
            break;
        }
    return r;
}

CrossingReport detect_crossings(const std::function<double(double)>& f, const std::function<double(double)>& g,
                                double t_max, double refine_tol, const CrossingOptions& opt = {});

} // namespace ergoflux
