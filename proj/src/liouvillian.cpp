#include "ergoflux/liouvillian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <unsupported/Eigen/MatrixFunctions>

#include "ergoflux/error.hpp"

namespace ergoflux {

namespace {

constexpr double kZeroMode = 1e-10;

Matrix unit(int d, int i, int j) {
    Matrix m = Matrix::Zero(d, d);
    m(i, j) = 1.0;
    return m;
}

} // namespace

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

CVector vectorize(const Matrix& m) {
    CVector v(m.size());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) v[i * m.cols() + j] = m(i, j);
    return v;
}

Matrix unvectorize(const CVector& v, int dim) {
    if (v.size() != static_cast<Eigen::Index>(dim) * dim) fail(ErrorCategory::dimension, "vector length is not d^2");
    Matrix m(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m(i, j) = v[i * dim + j];
    return m;
}

std::vector<JumpOperator> jump_operators(const ChannelSpec& c) {
    if (const auto* g = std::get_if<Gadc>(&c)) {
        return {{unit(2, 1, 0), g->gamma_minus()}, {unit(2, 0, 1), g->gamma_plus()}};
    }
    if (const auto* p = std::get_if<Pauli>(&c)) {
        Matrix sx = unit(2, 0, 1) + unit(2, 1, 0);
        Matrix sy = Matrix::Zero(2, 2);
        sy(0, 1) = cplx(0, -1);
        sy(1, 0) = cplx(0, 1);
        Matrix sz = unit(2, 0, 0) - unit(2, 1, 1);
        return {{sx, p->gamma_perp}, {sy, p->gamma_perp}, {sz, p->gamma_z}};
    }
    if (const auto* q = std::get_if<QutritAdc>(&c)) {
        return {{unit(3, 1, 0), q->gamma}, {unit(3, 2, 0), q->gamma}, {unit(3, 2, 1), q->gamma}};
    }
    fail(ErrorCategory::model, "the Lorentzian-bath channel has no time-local Lindblad generator");
}

Liouvillian build_liouvillian(const BatteryHamiltonian& h, const std::vector<JumpOperator>& jumps) {
    const int d = h.dim();
    const Matrix H = h.matrix();
    const Matrix id = Matrix::Identity(d, d);
    Matrix gen = cplx(0, -1) * (kron(H, id) - kron(id, H.transpose()));
    for (const auto& j : jumps) {
        if (j.op.rows() != d || j.op.cols() != d) fail(ErrorCategory::dimension, "jump operator has the wrong size");
        if (!(j.rate >= 0.0) || !std::isfinite(j.rate)) fail(ErrorCategory::physics, "jump rate must be >= 0");
        if (j.rate == 0.0) continue;
        const Matrix ldl = j.op.adjoint() * j.op;
        gen += 0.5 * j.rate * (2.0 * kron(j.op, j.op.conjugate()) - kron(ldl, id) - kron(id, ldl.transpose()));
    }

    Eigen::ComplexEigenSolver<Matrix> es(gen);
    if (es.info() != Eigen::Success) fail(ErrorCategory::numeric, "Liouvillian eigensolver did not converge");

    const auto n = gen.rows();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    // slowest first: real part descending, then imaginary part ascending
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
        const cplx la = es.eigenvalues()[a], lb = es.eigenvalues()[b];
        if (la.real() != lb.real()) return la.real() > lb.real();
        return la.imag() < lb.imag();
    });

    Liouvillian out;
    out.dim_ = d;
    out.gen_ = gen;
    out.evals_.resize(n);
    out.v_.resize(n, n);
    std::vector<Eigen::Index> zero_modes;
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto src = order[static_cast<std::size_t>(k)];
        out.evals_[k] = es.eigenvalues()[src];
        out.v_.col(k) = es.eigenvectors().col(src);
        if (std::abs(out.evals_[k]) < kZeroMode) zero_modes.push_back(k);
    }
    if (zero_modes.empty()) fail(ErrorCategory::model, "Liouvillian has no zero eigenvalue");

    if (zero_modes.size() == 1) {
        const auto k = zero_modes.front();
        const cplx tr = unvectorize(out.v_.col(k), d).trace();
        if (std::abs(tr) < 1e-12) fail(ErrorCategory::numeric, "zero mode is traceless");
        out.v_.col(k) /= tr;
    }

    Eigen::JacobiSVD<Matrix> svd(out.v_);
    const auto& sv = svd.singularValues();
    const double smin = sv[sv.size() - 1];
    out.cond_ = smin > 0.0 ? sv[0] / smin : std::numeric_limits<double>::infinity();
    if (!std::isfinite(out.cond_)) out.cond_ = std::numeric_limits<double>::infinity();
    out.vinv_ = std::isfinite(out.cond_) ? Matrix(out.v_.inverse()) : Matrix::Zero(n, n);

    for (Eigen::Index k = 0; k < n; ++k) {
        out.right_.push_back(unvectorize(out.v_.col(k), d));
        out.left_.push_back(unvectorize(out.vinv_.row(k).transpose(), d).conjugate());
    }

    if (zero_modes.size() == 1) {
        try {
            out.steady_ = DensityMatrix::from_numerical(out.right_[static_cast<std::size_t>(zero_modes.front())]);
        } catch (const Error&) {
            fail(ErrorCategory::numeric, "zero mode of the Liouvillian is not a valid state");
        }
    }
    return out;
}

Liouvillian build_liouvillian(const ChannelSpec& c) {
    validate(c);
    return build_liouvillian(hamiltonian(c), jump_operators(c));
}

DensityMatrix evolve_spectral(const Liouvillian& l, const DensityMatrix& rho0, double t) {
    if (rho0.dim() != l.dim_) fail(ErrorCategory::dimension, "state dimension does not match Liouvillian");
    if (!(t >= 0.0) || !std::isfinite(t)) fail(ErrorCategory::domain, "evolution time must be finite and >= 0");
    const CVector v0 = vectorize(rho0.matrix());
    CVector vt;
    if (l.uses_expm_fallback()) {
        const Matrix prop = (l.gen_ * cplx(t, 0.0)).exp();
        vt = prop * v0;
    } else {
        CVector c = l.vinv_ * v0;
        for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= std::exp(l.evals_[k] * t);
        vt = l.v_ * c;
    }
    return DensityMatrix::from_numerical(unvectorize(vt, l.dim_));
}

} // namespace ergoflux
