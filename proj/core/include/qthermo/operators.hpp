// Dense complex-operator foundation: Hermitian and density operators,
// spectral decompositions with degeneracy merging, column-stacking
// vectorization, propagators and matrix exponentials.
//
// Natural units throughout: hbar = k_B = 1, so frequencies, energies and
// temperatures share one unit.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "qthermo/errors.hpp"

namespace qthermo {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Max-abs entrywise deviation from A = A^dagger.
double hermiticity_defect(const Matrix& a);

// Hermitian operator (Hamiltonian, observable, coupling operator).
class HermitianOperator {
public:
    // Throws NonHermitianInput if the defect exceeds tol.
    explicit HermitianOperator(Matrix m, double tol = 1e-10);

    const Matrix& matrix() const { return m_; }
    Index dim() const { return m_.rows(); }

    // Symmetrizes (m + m^dagger)/2 before validating; for operators assembled
    // from products where roundoff breaks exact symmetry.
    static HermitianOperator symmetrized(const Matrix& m, double tol = 1e-10);

private:
    Matrix m_;
};

// Trace-one positive Hermitian matrix.
class DensityOperator {
public:
    explicit DensityOperator(Matrix rho, double hermitian_tol = 1e-12,
                             double trace_tol = 1e-10, double eigenvalue_floor = -1e-10);

    const Matrix& matrix() const { return rho_; }
    Index dim() const { return rho_.rows(); }
    double min_eigenvalue() const;

    static DensityOperator pure(const Vector& psi);
    static DensityOperator maximally_mixed(Index dim);
    static DensityOperator basis_state(Index dim, Index level);
    static DensityOperator from_populations(const RealVector& populations);

private:
    Matrix rho_;
};

// Eigenvalues and eigenprojectors of a Hermitian operator. Eigenvalues within
// the merging tolerance are clustered into a single projector, so the spectrum
// of Bohr frequencies is well defined.
struct SpectralDecomposition {
    RealVector eigenvalues;           // merged, ascending
    std::vector<Matrix> projectors;   // orthogonal, idempotent, sum to identity
    Index dim = 0;

    Matrix reconstruct() const;       // sum_k eps_k P_k
    Index levels() const { return eigenvalues.size(); }
};

// degeneracy_tol < 0 selects the default 1e-9 * (eps_max - eps_min).
SpectralDecomposition eigendecompose(const HermitianOperator& h, double degeneracy_tol = -1.0);

// Tr{rho O}; the imaginary residue (roundoff) is discarded.
double expectation(const DensityOperator& rho, const HermitianOperator& o);
double real_trace_product(const Matrix& a, const Matrix& b);  // Re Tr{a b}

// Column-stacking bijection between matrices and vectors.
Vector vectorize(const Matrix& a);
Matrix devectorize(const Vector& v);

// U = exp(-i H t) computed through the spectral decomposition.
Matrix hermitian_propagator(const HermitianOperator& h, double t);

// One fourth-order Magnus step of the time-ordered exponential of -i H(t)
// across [t0, t0 + dt], built from the two Gauss-Legendre nodes. Exact for
// commuting Hamiltonians.
Matrix magnus_step(const std::function<Matrix(double)>& hamiltonian_of_t, double t0, double dt);

// exp(A) for a general square complex matrix: Higham's scaling-and-squaring
// with Pade approximants of order 3/5/7/9/13.
Matrix matrix_exponential(const Matrix& a);

// Superoperator builders in the column-stacking convention
// vec(A X B) = (B^T kron A) vec(X).
Matrix kronecker(const Matrix& a, const Matrix& b);
Matrix superop_commutator(const Matrix& h);       // -i [h, .]
Matrix superop_dissipator(const Matrix& a);       // a . a^+ - (1/2){a^+ a, .}
Matrix superop_conjugation(const Matrix& u);      // u . u^+

// Trace norm ||A||_1 = sum of singular values; trace distance carries the
// conventional factor 1/2.
double trace_norm(const Matrix& a);
double trace_distance(const DensityOperator& a, const DensityOperator& b);

// Deterministic test states under the caller's engine (GUE-style).
Matrix random_hermitian(Index dim, std::mt19937_64& rng);
DensityOperator random_density(Index dim, std::mt19937_64& rng);

}  // namespace qthermo
