#include "ergoflux/ergotropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ergoflux/error.hpp"

namespace ergoflux {

double ergotropy(const DensityMatrix& rho, const BatteryHamiltonian& h) {
    if (rho.dim() != h.dim()) fail(ErrorCategory::dimension, "state and Hamiltonian dimensions differ");
    const double energy = (rho.matrix() * h.matrix()).trace().real();
    const auto eig = eigen_sorted(rho);
    // p descending against eps ascending
    double passive = 0.0;
    for (int i = 0; i < rho.dim(); ++i) passive += eig.values[i] * h.eigenvalues()[i];
    return std::max(0.0, energy - passive);
}

DensityMatrix passive_state(const DensityMatrix& rho, const BatteryHamiltonian& h) {
    if (rho.dim() != h.dim()) fail(ErrorCategory::dimension, "state and Hamiltonian dimensions differ");
    const auto eig = eigen_sorted(rho);
    Matrix m = Matrix::Zero(rho.dim(), rho.dim());
    for (int i = 0; i < rho.dim(); ++i) m += eig.values[i] * h.eigenbasis().col(i) * h.eigenbasis().col(i).adjoint();
    return DensityMatrix::from_numerical(m);
}

DensityMatrix dephase(const DensityMatrix& rho, const BatteryHamiltonian& h) {
    const Matrix r = in_energy_basis(rho, h);
    Matrix m = Matrix::Zero(rho.dim(), rho.dim());
    for (int i = 0; i < rho.dim(); ++i) m += r(i, i).real() * h.eigenbasis().col(i) * h.eigenbasis().col(i).adjoint();
    return DensityMatrix::from_numerical(m);
}

ErgotropyBreakdown ergotropy_breakdown(const DensityMatrix& rho, const BatteryHamiltonian& h) {
    ErgotropyBreakdown b;
    b.total = ergotropy(rho, h);
    b.incoherent = std::min(b.total, ergotropy(dephase(rho, h), h));
    b.coherent = b.total - b.incoherent;
    return b;
}

double qubit_ergotropy(const BlochVector& b, double h_z) { return h_z * ergo_form(b.z, b.x * b.x + b.y * b.y); }

double incoherent_vanish_time(double m_z, const Gadc& c) {
    const double a = c.a();
    const double arg = 1.0 + a * m_z;
    if (!(arg > 0.0)) fail(ErrorCategory::domain, "incoherent_vanish_time: 1 + a m_z must be positive");
    if (m_z <= 0.0) return 0.0;
    if (c.gamma == 0.0) return std::numeric_limits<double>::infinity();
    return std::log1p(a * m_z) / (a * c.gamma);
}

double iso_ergotropic_mx(double e0, double m_z) {
    if (!(e0 >= 0.0) || !std::isfinite(m_z)) fail(ErrorCategory::domain, "iso_ergotropic_mx: need e0 >= 0");
    double rad = e0 * e0 - 2.0 * e0 * m_z;
    if (rad < 0.0) {
        if (rad < -1e-14) fail(ErrorCategory::domain, "iso_ergotropic_mx: negative radicand");
        rad = 0.0;
    }
    if (rad + m_z * m_z > 1.0 + kStateTol) fail(ErrorCategory::domain, "iso_ergotropic_mx: point leaves the Bloch ball");
    return std::sqrt(rad);
}

double qutrit_table_ergotropy(const QutritDiagonal& q, double h_z) {
    if (!q.valid()) fail(ErrorCategory::domain, "qutrit populations outside the simplex");
    const double p1 = q.p1, p2 = q.p2, p3 = q.p3();
    double e;
    if (p1 <= p2 && p2 <= p3)
        e = 0.0;
    else if (p1 <= p3 && p3 <= p2)
        e = 2.0 * p2 + p1 - 1.0;
    else if (p2 <= p1 && p1 <= p3)
        e = p1 - p2;
    else if (p2 <= p3 && p3 <= p1)
        e = 3.0 * p1 - 1.0;
    else if (p3 <= p1 && p1 <= p2)
        e = 3.0 * (p1 + p2) - 2.0;
    else
        e = 4.0 * p1 + 2.0 * p2 - 2.0;
    return h_z * e;
}

} // namespace ergoflux
