#include "ergoflux/state.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "ergoflux/error.hpp"

namespace ergoflux {

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

double BlochVector::transverse() const { return std::hypot(x, y); }

bool BlochVector::in_ball(double tol) const { return x * x + y * y + z * z <= 1.0 + tol; }

BlochVector bloch_from_angles(double theta, double phi, double radius) {
    const double s = std::sin(theta);
    return {radius * s * std::cos(phi), radius * s * std::sin(phi), radius * std::cos(theta)};
}

bool QutritDiagonal::valid(double tol) const {
    return p1 >= -tol && p2 >= -tol && p1 + p2 <= 1.0 + tol && std::isfinite(p1) && std::isfinite(p2);
}

double max_hermitian_defect(const Matrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

DensityMatrix DensityMatrix::from_matrix(const Matrix& m) {
    if (m.rows() != m.cols() || (m.rows() != 2 && m.rows() != 3))
        fail(ErrorCategory::dimension, "density matrix must be 2x2 or 3x3");
    if (!m.allFinite())
        fail(ErrorCategory::domain, "density matrix has non-finite entries");
    if (max_hermitian_defect(m) > kHermTol)
        fail(ErrorCategory::domain, "density matrix is not Hermitian");
    const cplx tr = m.trace();
    if (std::abs(tr - 1.0) > kTraceTol)
        fail(ErrorCategory::domain, "density matrix trace differs from 1 by " + std::to_string(std::abs(tr - 1.0)));
    Matrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        fail(ErrorCategory::numeric, "eigensolver failed while validating density matrix");
    if (es.eigenvalues().minCoeff() < -kPositivityTol)
        fail(ErrorCategory::domain, "density matrix is not positive semidefinite");
    return DensityMatrix(std::move(h));
}

DensityMatrix DensityMatrix::from_numerical(const Matrix& m) {
    Matrix h = 0.5 * (m + m.adjoint());
    // renormalise away rounding in the trace, nothing more
    const double tr = h.trace().real();
    if (std::abs(tr - 1.0) < 1e-9) h /= tr;
    return from_matrix(h);
}

BatteryHamiltonian BatteryHamiltonian::qubit(double h_z) {
    if (!(h_z > 0.0) || !std::isfinite(h_z)) fail(ErrorCategory::domain, "h_z must be positive");
    Eigen::VectorXd ev(2);
    ev << -h_z, h_z;
    Matrix basis = Matrix::Zero(2, 2);
    basis(1, 0) = 1.0; // ground is index 1
    basis(0, 1) = 1.0;
    return BatteryHamiltonian(h_z, ev, basis);
}

BatteryHamiltonian BatteryHamiltonian::qutrit(double h_z) {
    if (!(h_z > 0.0) || !std::isfinite(h_z)) fail(ErrorCategory::domain, "h_z must be positive");
    Eigen::VectorXd ev(3);
    ev << -h_z, 0.0, h_z;
    Matrix basis = Matrix::Zero(3, 3);
    basis(2, 0) = 1.0;
    basis(1, 1) = 1.0;
    basis(0, 2) = 1.0;
    return BatteryHamiltonian(h_z, ev, basis);
}

BatteryHamiltonian BatteryHamiltonian::for_dim(int dim, double h_z) {
    if (dim == 2) return qubit(h_z);
    if (dim == 3) return qutrit(h_z);
    fail(ErrorCategory::dimension, "only qubits and qutrits are supported");
}

Matrix BatteryHamiltonian::matrix() const {
    return eigenbasis_ * eigenvalues_.cast<cplx>().asDiagonal() * eigenbasis_.adjoint();
}

DensityMatrix bloch_to_density(const BlochVector& b) {
    if (!std::isfinite(b.x) || !std::isfinite(b.y) || !std::isfinite(b.z) || !b.in_ball())
        fail(ErrorCategory::domain, "Bloch vector outside the unit ball");
    Matrix m(2, 2);
    m(0, 0) = 0.5 * (1.0 + b.z);
    m(1, 1) = 0.5 * (1.0 - b.z);
    m(0, 1) = 0.5 * cplx(b.x, -b.y);
    m(1, 0) = 0.5 * cplx(b.x, b.y);
    return DensityMatrix::from_matrix(m);
}

BlochVector density_to_bloch(const DensityMatrix& rho) {
    if (rho.dim() != 2) fail(ErrorCategory::dimension, "Bloch coordinates need a qubit");
    const cplx r01 = rho(0, 1);
    return {2.0 * r01.real(), -2.0 * r01.imag(), (rho(0, 0) - rho(1, 1)).real()};
}

DensityMatrix qutrit_to_density(const QutritDiagonal& q) {
    if (!q.valid()) fail(ErrorCategory::domain, "qutrit populations outside the simplex");
    Matrix m = Matrix::Zero(3, 3);
    m(0, 0) = q.p1;
    m(1, 1) = q.p2;
    m(2, 2) = q.p3();
    return DensityMatrix::from_matrix(m);
}

EigenDecomposition eigen_sorted(const Matrix& herm) {
    if (herm.rows() != herm.cols()) fail(ErrorCategory::dimension, "eigen_sorted needs a square matrix");
    if (max_hermitian_defect(herm) > kHermTol) fail(ErrorCategory::domain, "matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (herm + herm.adjoint()));
    if (es.info() != Eigen::Success) fail(ErrorCategory::numeric, "Hermitian eigensolver failed");
    const auto n = herm.rows();
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    // descending, ties keep solver order
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) {
        return es.eigenvalues()[a] > es.eigenvalues()[b];
    });
    EigenDecomposition out{Eigen::VectorXd(n), Matrix(n, n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        out.values[k] = es.eigenvalues()[idx[static_cast<std::size_t>(k)]];
        out.vectors.col(k) = es.eigenvectors().col(idx[static_cast<std::size_t>(k)]);
    }
    return out;
}

EigenDecomposition eigen_sorted(const DensityMatrix& rho) { return eigen_sorted(rho.matrix()); }

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dim() != b.dim()) fail(ErrorCategory::dimension, "trace distance between different dimensions");
    const Matrix d = a.matrix() - b.matrix();
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) fail(ErrorCategory::numeric, "eigensolver failed in trace distance");
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

Matrix in_energy_basis(const DensityMatrix& rho, const BatteryHamiltonian& h) {
    if (rho.dim() != h.dim()) fail(ErrorCategory::dimension, "state and Hamiltonian dimensions differ");
    return h.eigenbasis().adjoint() * rho.matrix() * h.eigenbasis();
}

double l1_coherence(const DensityMatrix& rho, const BatteryHamiltonian& h) {
    const Matrix r = in_energy_basis(rho, h);
    double s = 0.0;
    for (Eigen::Index i = 0; i < r.rows(); ++i)
        for (Eigen::Index j = 0; j < r.cols(); ++j)
            if (i != j) s += std::abs(r(i, j));
    return s;
}

} // namespace ergoflux
