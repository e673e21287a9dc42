#include "ergoflux/crossing.hpp"

#include <algorithm>

namespace ergoflux {

std::string_view parity_name(Parity p) {
    switch (p) {
    case Parity::zero: return "zero";
    case Parity::odd: return "odd";
    case Parity::even: return "even";
    }
    return "zero";
}

Parity parity_of(std::size_t count) {
    if (count == 0) return Parity::zero;
    return count % 2 ? Parity::odd : Parity::even;
}

namespace detail {

namespace {
int sgn(double v) { return (v > 0.0) - (v < 0.0); }
} // namespace

SampleScan scan_samples(const std::vector<double>& d, double tangency_tol) {
    SampleScan out;
    const std::size_t n = d.size();
    std::size_t last = 0;
    int last_sign = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const int s = sgn(d[k]);
        if (s == 0) continue;
        if (last_sign != 0) {
            if (s != last_sign)
                out.brackets.emplace_back(last, k);
            else if (k > last + 1)
                out.touches.push_back(last + 1 + (k - last - 2) / 2); // exact zeros, same sign either side
        }
        last = k;
        last_sign = s;
    }
    // near-touches that never reach zero: strict local minima of |d| below tolerance
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double a = std::abs(d[k]);
        if (a == 0.0 || a >= tangency_tol) continue;
        if (a < std::abs(d[k - 1]) && a < std::abs(d[k + 1]) && sgn(d[k - 1]) == sgn(d[k]) && sgn(d[k + 1]) == sgn(d[k]))
            out.touches.push_back(k);
    }
    std::sort(out.touches.begin(), out.touches.end());
    return out;
}

double lower_on_top_fraction(const std::vector<double>& d) {
    if (d.empty()) return 0.0;
    const double s0 = d[0] >= 0.0 ? 1.0 : -1.0;
    double pos = 0.0, neg = 0.0;
    for (std::size_t k = 0; k + 1 < d.size(); ++k) {
        const double a = s0 * d[k], b = s0 * d[k + 1];
        if (a >= 0.0 && b >= 0.0) {
            pos += 0.5 * (a + b);
        } else if (a <= 0.0 && b <= 0.0) {
            neg -= 0.5 * (a + b);
        } else {
            const double frac = a / (a - b);
            if (a > 0.0) {
                pos += 0.5 * a * frac;
                neg -= 0.5 * b * (1.0 - frac);
            } else {
                neg -= 0.5 * a * frac;
                pos += 0.5 * b * (1.0 - frac);
            }
        }
    }
    const double total = pos + neg;
    return total > 0.0 ? neg / total : 0.0;
}

double bisect(const std::function<double(double)>& diff, double lo, double hi, double d_lo, double tol) {
    const int s_lo = sgn(d_lo);
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double v = diff(mid);
        if (v == 0.0) return mid;
        if (sgn(v) == s_lo)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

void add_event(CrossingReport& r, double t, bool touch) {
    auto it = std::upper_bound(r.event_times.begin(), r.event_times.end(), t);
    const auto pos = it - r.event_times.begin();
    r.event_times.insert(it, t);
    r.tangency_flags.insert(r.tangency_flags.begin() + pos, touch);
}

} // namespace detail

CrossingReport detect_crossings(const std::function<double(double)>& f, const std::function<double(double)>& g,
                                double t_max, double refine_tol, const CrossingOptions& opt) {
    auto diff = [&](double t) { return resolved_difference(f(t), g(t)); };
    auto sample = [&](std::size_t k, std::size_t n) {
        return diff(t_max * (static_cast<double>(k) / static_cast<double>(n)));
    };
    return detect_crossings_sampled(sample, diff, t_max, refine_tol, opt);
}

} // namespace ergoflux
