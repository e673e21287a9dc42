#pragma once

#include <optional>
#include <vector>

#include "ergoflux/channels.hpp"
#include "ergoflux/state.hpp"

namespace ergoflux {

struct JumpOperator {
    Matrix op;
    double rate = 0.0;
};

// Lindblad jumps of a Markovian channel (model error for the non-Markovian one)
std::vector<JumpOperator> jump_operators(const ChannelSpec& c);

// Row-major vectorisation: vec(A rho B) = (A kron B^T) vec(rho).
CVector vectorize(const Matrix& m);
Matrix unvectorize(const CVector& v, int dim);
Matrix kron(const Matrix& a, const Matrix& b);

class Liouvillian {
public:
    int dim() const { return dim_; } // Hilbert-space dimension d; generator is d^2 x d^2
    const Matrix& generator() const { return gen_; }
    const CVector& eigenvalues() const { return evals_; }
    // r_i as matrices; the zero mode is scaled to unit trace
    const std::vector<Matrix>& right_eigenmatrices() const { return right_; }
    // l_i with Tr[l_i^dagger r_j] = delta_ij
    const std::vector<Matrix>& left_eigenmatrices() const { return left_; }
    // empty when the zero eigenvalue is degenerate (e.g. no dissipation at all)
    const std::optional<DensityMatrix>& steady_state() const { return steady_; }
    double eigenvector_condition() const { return cond_; }
    bool uses_expm_fallback() const { return cond_ > 1e8; }

    friend Liouvillian build_liouvillian(const BatteryHamiltonian& h, const std::vector<JumpOperator>& jumps);
    friend DensityMatrix evolve_spectral(const Liouvillian& l, const DensityMatrix& rho0, double t);

private:
    int dim_ = 0;
    Matrix gen_;
    CVector evals_;
    Matrix v_;    // right eigenvectors as columns
    Matrix vinv_; // rows are left eigenvectors
    std::vector<Matrix> right_;
    std::vector<Matrix> left_;
    std::optional<DensityMatrix> steady_;
    double cond_ = 1.0;
};

Liouvillian build_liouvillian(const BatteryHamiltonian& h, const std::vector<JumpOperator>& jumps);
Liouvillian build_liouvillian(const ChannelSpec& c);

// rho(t) = V exp(Lambda t) V^-1 vec(rho0), or a dense matrix exponential when V is ill conditioned
DensityMatrix evolve_spectral(const Liouvillian& l, const DensityMatrix& rho0, double t);

} // namespace ergoflux
