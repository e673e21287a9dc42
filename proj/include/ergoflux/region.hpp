#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "ergoflux/channels.hpp"
#include "ergoflux/state.hpp"

namespace ergoflux {

struct Axis {
    std::string name;
    double min = 0.0;
    double max = 1.0;
    std::size_t n = 2;

    double at(std::size_t i) const; // inclusive at both ends
};

struct GridSpec {
    Axis axis1;
    Axis axis2;
    std::map<std::string, double> fixed;

    void validate() const; // domain error on n < 2 or min >= max
    std::size_t size() const { return axis1.n * axis2.n; }
};

struct RegionPoint {
    double v1 = 0.0;
    double v2 = 0.0;
    bool valid_state = false;
    std::size_t crossing_count = 0; // ergotropy crossings against the reference
    bool emc = false;
    bool state_mpemba = false;
    double mpemba_parameter = 0.0;
    bool iso_flag = false;   // |dE| < 1e-3 E_ref, cosmetic
    bool degenerate = false; // equal initial ergotropy: no strict ordering to flip
    bool anomaly = false;    // even nonzero count where the model allows only odd
    bool beyond_horizon = false;
    std::size_t tangencies = 0;
    std::size_t state_crossings = 0;
};

struct RegionMap {
    std::string kind;
    GridSpec grid;
    double horizon = 0.0;
    std::vector<RegionPoint> points; // row-major: index = i1 * axis2.n + i2
    std::size_t anomalies = 0;

    const RegionPoint& at(std::size_t i1, std::size_t i2) const { return points[i1 * grid.axis2.n + i2]; }
};

struct ScanOptions {
    std::size_t threads = 0; // 0: ERGOFLUX_THREADS, else hardware concurrency
    double horizon = 0.0;    // 0: channel default
};

std::size_t scan_threads(std::size_t requested);

// (m_x, m_z) plane at m_y = 0; GADC, Pauli or the Lorentzian-bath channel
RegionMap scan_emc_qubit(const BlochVector& ref, const ChannelSpec& c, const GridSpec& grid, const ScanOptions& opt = {});
// (p1, p2) simplex of diagonal qutrit states
RegionMap scan_qutrit_simplex(const QutritDiagonal& ref, const QutritAdc& c, const GridSpec& grid,
                              const ScanOptions& opt = {});
// crossing counts against a fixed reference; even nonzero counts are flagged as anomalies
RegionMap scan_crossing_count_nm(const BlochVector& ref, const NonMarkovAdc& c, const GridSpec& grid,
                                 const ScanOptions& opt = {});
// ergotropic and trace-distance crossings side by side
RegionMap scan_state_vs_emc(const BlochVector& ref, const ChannelSpec& c, const GridSpec& grid, const ScanOptions& opt = {});
RegionMap scan_state_vs_emc(const QutritDiagonal& ref, const QutritAdc& c, const GridSpec& grid,
                            const ScanOptions& opt = {});
// pure-state pairs over (theta1, theta2); each pair is integrated up to its own t_f
RegionMap scan_mpemba_parameter_pure(const Gadc& c, const GridSpec& grid, const ScanOptions& opt = {});

} // namespace ergoflux
