#include "ergoflux/region.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <exception>
#include <mutex>
#include <thread>

#include "ergoflux/crossing.hpp"
#include "ergoflux/ergotropy.hpp"
#include "ergoflux/error.hpp"

namespace ergoflux {

double Axis::at(std::size_t i) const {
    if (i + 1 >= n) return max;
    return min + (max - min) * (static_cast<double>(i) / static_cast<double>(n - 1));
}

void GridSpec::validate() const {
    for (const Axis* a : {&axis1, &axis2}) {
        if (a->n < 2) fail(ErrorCategory::domain, "grid axis '" + a->name + "' needs at least two points");
        if (!(a->min < a->max) || !std::isfinite(a->min) || !std::isfinite(a->max))
            fail(ErrorCategory::domain, "grid axis '" + a->name + "' needs min < max");
    }
}

std::size_t scan_threads(std::size_t requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("ERGOFLUX_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

constexpr std::size_t kTableIntervals = 4096;
constexpr double kDegenerateTol = 1e-12;

// Runs fn(i) for every grid index. Each worker owns a contiguous block and writes
// only its own slots, so the result does not depend on scheduling.
template <class Fn>
void parallel_points(std::size_t count, std::size_t threads, Fn fn) {
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex m;
    const std::size_t chunk = (count + threads - 1) / threads;
    for (std::size_t w = 0; w < threads; ++w) {
        const std::size_t lo = w * chunk, hi = std::min(count, lo + chunk);
        pool.emplace_back([&, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(m);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

// Time factors and reference curves tabulated once on the finest grid that the
// crossing detector normally needs; everything else is evaluated directly.
template <class K>
class PairEngine {
public:
    using State = typename K::State;

    PairEngine(K k, State ref, double horizon, bool with_distance)
        : k_(k), ref_(ref), horizon_(horizon), with_distance_(with_distance) {
        f_.reserve(kTableIntervals + 1);
        for (std::size_t i = 0; i <= kTableIntervals; ++i) f_.push_back(k_.at(time(i, kTableIntervals)));
        for (const auto& f : f_) {
            ref_e_.push_back(k_.ergotropy(ref_, f));
            if (with_distance_) ref_d_.push_back(k_.distance(ref_, f));
        }
    }

    double ref_ergotropy0() const { return ref_e_[0]; }

    void classify(const State& p, RegionPoint& out) const {
        const double e0 = k_.ergotropy(p, f_[0]);
        const double dE = e0 - ref_e_[0];
        out.iso_flag = std::abs(dE) < 1e-3 * ref_e_[0];
        if (std::abs(dE) <= kDegenerateTol) {
            out.degenerate = true;
        } else {
            auto sample = [&](std::size_t i, std::size_t n) {
                if (n <= kTableIntervals) {
                    const std::size_t j = i * (kTableIntervals / n);
                    return resolved_difference(k_.ergotropy(p, f_[j]), ref_e_[j]);
                }
                const double t = time(i, n);
                const auto f = k_.at(t);
                return resolved_difference(k_.ergotropy(p, f), k_.ergotropy(ref_, f));
            };
            auto eval = [&](double t) {
                const auto f = k_.at(t);
                return resolved_difference(k_.ergotropy(p, f), k_.ergotropy(ref_, f));
            };
            auto rep = detect_crossings_sampled(sample, eval, horizon_, 1e-8 * horizon_);
            out.crossing_count = rep.count;
            out.tangencies = static_cast<std::size_t>(std::count(rep.tangency_flags.begin(), rep.tangency_flags.end(), true));
            // beyond the horizon only the asymptotic ordering is left to compare
            const int s_end = rep.final_sign;
            const int s_inf = k_.asymptotic_order(p, ref_);
            if (s_end != 0 && s_inf != 0 && s_end != s_inf) {
                ++out.crossing_count;
                out.beyond_horizon = true;
            }
            out.emc = out.crossing_count > 0;
            out.mpemba_parameter = rep.count > 0 ? rep.mpemba_parameter : 0.0;
        }
        if (with_distance_) {
            const double d0 = k_.distance(p, f_[0]);
            if (std::abs(d0 - ref_d_[0]) > kDegenerateTol) {
                auto sample = [&](std::size_t i, std::size_t n) {
                    if (n <= kTableIntervals) {
                        const std::size_t j = i * (kTableIntervals / n);
                        return resolved_difference(k_.distance(p, f_[j]), ref_d_[j]);
                    }
                    const auto f = k_.at(time(i, n));
                    return resolved_difference(k_.distance(p, f), k_.distance(ref_, f));
                };
                auto eval = [&](double t) {
                    const auto f = k_.at(t);
                    return resolved_difference(k_.distance(p, f), k_.distance(ref_, f));
                };
                auto rep = detect_crossings_sampled(sample, eval, horizon_, 1e-8 * horizon_);
                std::size_t n = rep.count;
                const int s_end = rep.final_sign;
                const int s_inf = k_.asymptotic_distance_order(p, ref_);
                if (s_end != 0 && s_inf != 0 && s_end != s_inf) ++n;
                out.state_crossings = n;
                out.state_mpemba = n > 0;
            }
        }
    }

private:
    double time(std::size_t i, std::size_t n) const {
        return horizon_ * (static_cast<double>(i) / static_cast<double>(n));
    }

    K k_;
    State ref_;
    double horizon_;
    bool with_distance_;
    std::vector<typename K::Factors> f_;
    std::vector<double> ref_e_;
    std::vector<double> ref_d_;
};

void require_axes(const GridSpec& g, const char* a1, const char* a2) {
    g.validate();
    if (g.axis1.name != a1 || g.axis2.name != a2)
        fail(ErrorCategory::domain, std::string("this scan expects axes (") + a1 + ", " + a2 + ")");
}

void require_xz_plane(const GridSpec& g) {
    require_axes(g, "m_x", "m_z");
    for (const auto& [k, v] : g.fixed) {
        if (k != "m_y") fail(ErrorCategory::domain, "unknown fixed grid parameter '" + k + "'");
        if (v != 0.0) fail(ErrorCategory::domain, "qubit scans run in the m_y = 0 plane");
    }
}

template <class K>
RegionMap scan_qubit_plane(K k, const BlochVector& ref, const GridSpec& grid, const ScanOptions& opt, double horizon,
                           bool with_distance, std::string kind) {
    require_xz_plane(grid);
    if (!ref.in_ball()) fail(ErrorCategory::domain, "reference state outside the Bloch ball");
    const PairEngine<K> eng(k, ref, horizon, with_distance);
    if (!(eng.ref_ergotropy0() > 0.0)) fail(ErrorCategory::domain, "degenerate reference: zero ergotropy");
    RegionMap map;
    map.kind = std::move(kind);
    map.grid = grid;
    map.horizon = horizon;
    map.points.resize(grid.size());
    parallel_points(grid.size(), scan_threads(opt.threads), [&](std::size_t idx) {
        RegionPoint& pt = map.points[idx];
        pt.v1 = grid.axis1.at(idx / grid.axis2.n);
        pt.v2 = grid.axis2.at(idx % grid.axis2.n);
        const BlochVector b{pt.v1, 0.0, pt.v2};
        pt.valid_state = b.in_ball();
        if (pt.valid_state) eng.classify(b, pt);
    });
    return map;
}

double horizon_for(const ChannelSpec& c, const ScanOptions& opt) {
    if (opt.horizon > 0.0) return opt.horizon;
    return default_horizon(c);
}

RegionMap scan_qubit_dispatch(const BlochVector& ref, const ChannelSpec& c, const GridSpec& grid, const ScanOptions& opt,
                              bool with_distance, const std::string& kind) {
    validate(c);
    const double h = horizon_for(c, opt);
    if (const auto* g = std::get_if<Gadc>(&c)) return scan_qubit_plane(GadcKernel{*g}, ref, grid, opt, h, with_distance, kind);
    if (const auto* p = std::get_if<Pauli>(&c)) return scan_qubit_plane(PauliKernel{*p}, ref, grid, opt, h, with_distance, kind);
    if (const auto* n = std::get_if<NonMarkovAdc>(&c)) {
        auto map = scan_qubit_plane(NmKernel{*n}, ref, grid, opt, h, with_distance, kind);
        for (auto& pt : map.points) {
            pt.anomaly = pt.valid_state && pt.crossing_count > 0 && pt.crossing_count % 2 == 0;
            map.anomalies += pt.anomaly;
        }
        return map;
    }
    fail(ErrorCategory::dimension, "qubit plane scans need a qubit channel");
}

RegionMap scan_simplex(const QutritDiagonal& ref, const QutritAdc& c, const GridSpec& grid, const ScanOptions& opt,
                       bool with_distance, std::string kind) {
    validate(ChannelSpec{c});
    require_axes(grid, "p1", "p2");
    if (!grid.fixed.empty()) fail(ErrorCategory::domain, "qutrit simplex scans take no fixed parameters");
    if (!ref.valid()) fail(ErrorCategory::domain, "reference outside the simplex");
    const double h = horizon_for(ChannelSpec{c}, opt);
    const PairEngine<QutritKernel> eng(QutritKernel{c}, ref, h, with_distance);
    if (!(eng.ref_ergotropy0() > 0.0)) fail(ErrorCategory::domain, "degenerate reference: zero ergotropy");
    RegionMap map;
    map.kind = std::move(kind);
    map.grid = grid;
    map.horizon = h;
    map.points.resize(grid.size());
    parallel_points(grid.size(), scan_threads(opt.threads), [&](std::size_t idx) {
        RegionPoint& pt = map.points[idx];
        pt.v1 = grid.axis1.at(idx / grid.axis2.n);
        pt.v2 = grid.axis2.at(idx % grid.axis2.n);
        const QutritDiagonal q{pt.v1, pt.v2};
        pt.valid_state = q.valid();
        if (pt.valid_state) eng.classify(q, pt);
    });
    return map;
}

} // namespace

RegionMap scan_emc_qubit(const BlochVector& ref, const ChannelSpec& c, const GridSpec& grid, const ScanOptions& opt) {
    return scan_qubit_dispatch(ref, c, grid, opt, false, "emc");
}

RegionMap scan_qutrit_simplex(const QutritDiagonal& ref, const QutritAdc& c, const GridSpec& grid, const ScanOptions& opt) {
    return scan_simplex(ref, c, grid, opt, false, "qutrit_simplex");
}

RegionMap scan_crossing_count_nm(const BlochVector& ref, const NonMarkovAdc& c, const GridSpec& grid,
                                 const ScanOptions& opt) {
    return scan_qubit_dispatch(ref, ChannelSpec{c}, grid, opt, false, "crossing_count");
}

RegionMap scan_state_vs_emc(const BlochVector& ref, const ChannelSpec& c, const GridSpec& grid, const ScanOptions& opt) {
    return scan_qubit_dispatch(ref, c, grid, opt, true, "state_vs_emc");
}

RegionMap scan_state_vs_emc(const QutritDiagonal& ref, const QutritAdc& c, const GridSpec& grid, const ScanOptions& opt) {
    return scan_simplex(ref, c, grid, opt, true, "state_vs_emc");
}

RegionMap scan_mpemba_parameter_pure(const Gadc& c, const GridSpec& grid, const ScanOptions& opt) {
    validate(ChannelSpec{c});
    require_axes(grid, "theta1", "theta2");
    if (!grid.fixed.empty()) fail(ErrorCategory::domain, "pure-state scans take no fixed parameters");
    constexpr double pi = 3.141592653589793;
    for (const Axis* a : {&grid.axis1, &grid.axis2})
        if (a->min < 0.0 || a->max > pi) fail(ErrorCategory::domain, "polar angle axes must lie in [0, pi]");
    const GadcKernel k{c};
    const double cap = opt.horizon > 0.0 ? opt.horizon : 200.0 / slowest_rate(ChannelSpec{c});

    // last time a monotone curve is above thr, capped
    auto fall_time = [&](const BlochVector& b, double thr) {
        if (k.ergotropy(b, k.at(0.0)) <= thr) return 0.0;
        if (k.ergotropy(b, k.at(cap)) > thr) return cap;
        double lo = 0.0, hi = cap;
        while (hi - lo > 1e-12 * cap) {
            const double mid = 0.5 * (lo + hi);
            (k.ergotropy(b, k.at(mid)) > thr ? lo : hi) = mid;
        }
        return hi;
    };

    RegionMap map;
    map.kind = "mpemba_parameter";
    map.grid = grid;
    map.horizon = cap;
    map.points.resize(grid.size());
    parallel_points(grid.size(), scan_threads(opt.threads), [&](std::size_t idx) {
        RegionPoint& pt = map.points[idx];
        pt.v1 = grid.axis1.at(idx / grid.axis2.n);
        pt.v2 = grid.axis2.at(idx % grid.axis2.n);
        pt.valid_state = true;
        const BlochVector b1 = bloch_from_angles(pt.v1), b2 = bloch_from_angles(pt.v2);
        const double e1 = k.ergotropy(b1, k.at(0.0)), e2 = k.ergotropy(b2, k.at(0.0));
        if (pt.v1 == pt.v2 || std::abs(e1 - e2) <= kDegenerateTol) {
            pt.degenerate = true;
            return;
        }
        const double thr = 1e-6 * std::max(e1, e2);
        const double t_f = std::max(fall_time(b1, thr), fall_time(b2, thr));
        if (!(t_f > 0.0)) return;
        auto diff = [&](double t) {
            const auto f = k.at(t);
            return resolved_difference(k.ergotropy(b1, f), k.ergotropy(b2, f));
        };
        auto sample = [&](std::size_t i, std::size_t n) { return diff(t_f * (static_cast<double>(i) / static_cast<double>(n))); };
        const auto rep = detect_crossings_sampled(sample, diff, t_f, 1e-10 * t_f);
        pt.crossing_count = rep.count;
        pt.emc = rep.count > 0;
        pt.mpemba_parameter = rep.count > 0 ? rep.mpemba_parameter : 0.0;
    });
    return map;
}

} // namespace ergoflux
