#pragma once

#include <complex>

#include <Eigen/Dense>

namespace ergoflux {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kStateTol = 1e-12;
inline constexpr double kHermTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPositivityTol = 1e-10;

// Basis convention used everywhere: row/column 0 is the highest energy level.
// For a qubit that means m_z = +1 is the excited state.

struct BlochVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm() const;
    double transverse() const; // sqrt(x^2 + y^2), the l1 coherence of a qubit
    bool in_ball(double tol = kStateTol) const;
};

// m_z = cos(theta), transverse part sin(theta) along phi
BlochVector bloch_from_angles(double theta, double phi = 0.0, double radius = 1.0);

class DensityMatrix {
public:
    // throws domain (bad entries) or dimension (d not 2 or 3)
    static DensityMatrix from_matrix(const Matrix& m);
    // hermitizes first; meant for outputs of numerical propagation
    static DensityMatrix from_numerical(const Matrix& m);

    int dim() const { return static_cast<int>(m_.rows()); }
    const Matrix& matrix() const { return m_; }
    cplx operator()(int i, int j) const { return m_(i, j); }

private:
    explicit DensityMatrix(Matrix m) : m_(std::move(m)) {}
    Matrix m_;
};

class BatteryHamiltonian {
public:
    static BatteryHamiltonian qubit(double h_z);  // h_z sigma_z
    static BatteryHamiltonian qutrit(double h_z); // h_z diag(1, 0, -1)
    static BatteryHamiltonian for_dim(int dim, double h_z);

    int dim() const { return static_cast<int>(eigenvalues_.size()); }
    double h_z() const { return h_z_; }
    const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; } // ascending
    const Matrix& eigenbasis() const { return eigenbasis_; }           // column k <-> eigenvalues()[k]
    Matrix matrix() const;

private:
    BatteryHamiltonian(double h_z, Eigen::VectorXd ev, Matrix basis)
        : h_z_(h_z), eigenvalues_(std::move(ev)), eigenbasis_(std::move(basis)) {}
    double h_z_;
    Eigen::VectorXd eigenvalues_;
    Matrix eigenbasis_;
};

// populations of the top (p1) and middle (p2) levels, ground = 1 - p1 - p2
struct QutritDiagonal {
    double p1 = 0.0;
    double p2 = 0.0;

    double p3() const { return 1.0 - p1 - p2; }
    bool valid(double tol = kStateTol) const;
};

struct EigenDecomposition {
    Eigen::VectorXd values; // descending
    Matrix vectors;         // column k <-> values[k]
};

DensityMatrix bloch_to_density(const BlochVector& b);
BlochVector density_to_bloch(const DensityMatrix& rho);
DensityMatrix qutrit_to_density(const QutritDiagonal& q);

double trace_distance(const DensityMatrix& a, const DensityMatrix& b);
double l1_coherence(const DensityMatrix& rho, const BatteryHamiltonian& h);

EigenDecomposition eigen_sorted(const DensityMatrix& rho);
// raw Hermitian input; throws domain if the matrix is not Hermitian within kHermTol
EigenDecomposition eigen_sorted(const Matrix& herm);

// rho written in the eigenbasis of h (columns ordered by ascending energy)
Matrix in_energy_basis(const DensityMatrix& rho, const BatteryHamiltonian& h);

double max_hermitian_defect(const Matrix& m);

} // namespace ergoflux
