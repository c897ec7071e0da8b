#include "qthermo/operators.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>

namespace qthermo {

double hermiticity_defect(const Matrix& a) {
    if (a.rows() != a.cols()) {
        throw DimensionMismatch("hermiticity_defect: matrix must be square");
    }
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

HermitianOperator::HermitianOperator(Matrix m, double tol) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0) {
        throw DimensionMismatch("HermitianOperator: matrix must be square and non-empty");
    }
    const double defect = hermiticity_defect(m_);
    if (defect > tol) {
        throw NonHermitianInput("HermitianOperator: hermiticity defect " +
                                std::to_string(defect) + " exceeds tolerance");
    }
}

HermitianOperator HermitianOperator::symmetrized(const Matrix& m, double tol) {
    if (m.rows() != m.cols()) {
        throw DimensionMismatch("HermitianOperator::symmetrized: matrix must be square");
    }
    return HermitianOperator(0.5 * (m + m.adjoint().eval()), tol);
}

DensityOperator::DensityOperator(Matrix rho, double hermitian_tol, double trace_tol,
                                 double eigenvalue_floor)
    : rho_(std::move(rho)) {
    if (rho_.rows() != rho_.cols() || rho_.rows() == 0) {
        throw DimensionMismatch("DensityOperator: matrix must be square and non-empty");
    }
    if (hermiticity_defect(rho_) > hermitian_tol) {
        throw NonHermitianInput("DensityOperator: state is not Hermitian");
    }
    const double tr = rho_.trace().real();
    if (std::abs(tr - 1.0) > trace_tol) {
        throw DomainError("DensityOperator: trace " + std::to_string(tr) + " is not 1");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(rho_, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < eigenvalue_floor) {
        throw PositivityLoss("DensityOperator: minimum eigenvalue " +
                             std::to_string(solver.eigenvalues().minCoeff()) +
                             " below floor");
    }
}

double DensityOperator::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(rho_, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

DensityOperator DensityOperator::pure(const Vector& psi) {
    const double norm = psi.norm();
    if (norm == 0.0) throw DomainError("DensityOperator::pure: zero vector");
    Vector n = psi / norm;
    return DensityOperator(n * n.adjoint());
}

DensityOperator DensityOperator::maximally_mixed(Index dim) {
    return DensityOperator(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityOperator DensityOperator::basis_state(Index dim, Index level) {
    if (level < 0 || level >= dim) throw DomainError("basis_state: level out of range");
    Matrix rho = Matrix::Zero(dim, dim);
    rho(level, level) = 1.0;
    return DensityOperator(std::move(rho));
}

DensityOperator DensityOperator::from_populations(const RealVector& populations) {
    Matrix rho = Matrix::Zero(populations.size(), populations.size());
    for (Index i = 0; i < populations.size(); ++i) rho(i, i) = populations(i);
    return DensityOperator(std::move(rho));
}

Matrix SpectralDecomposition::reconstruct() const {
    Matrix out = Matrix::Zero(dim, dim);
    for (Index k = 0; k < eigenvalues.size(); ++k) {
        out += eigenvalues(k) * projectors[static_cast<size_t>(k)];
    }
    return out;
}

SpectralDecomposition eigendecompose(const HermitianOperator& h, double degeneracy_tol) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
    if (solver.info() != Eigen::Success) {
        throw NotConverged("eigendecompose: eigensolver failed");
    }
    const RealVector& eps = solver.eigenvalues();
    const Matrix& vecs = solver.eigenvectors();
    const Index n = eps.size();

    double tol = degeneracy_tol;
    if (tol < 0.0) tol = 1e-9 * (eps(n - 1) - eps(0));
    if (tol <= 0.0) tol = 1e-14;

    SpectralDecomposition dec;
    dec.dim = h.dim();
    std::vector<double> merged;
    Index start = 0;
    while (start < n) {
        Index stop = start + 1;
        while (stop < n && eps(stop) - eps(stop - 1) <= tol) ++stop;
        Matrix proj = Matrix::Zero(dec.dim, dec.dim);
        double value = 0.0;
        for (Index k = start; k < stop; ++k) {
            proj += vecs.col(k) * vecs.col(k).adjoint();
            value += eps(k);
        }
        proj = 0.5 * (proj + proj.adjoint().eval());
        merged.push_back(value / static_cast<double>(stop - start));
        dec.projectors.push_back(std::move(proj));
        start = stop;
    }
    dec.eigenvalues = Eigen::Map<const RealVector>(merged.data(), static_cast<Index>(merged.size()));
    return dec;
}

double expectation(const DensityOperator& rho, const HermitianOperator& o) {
    if (rho.dim() != o.dim()) {
        throw DimensionMismatch("expectation: state and observable dimensions differ");
    }
    return (rho.matrix() * o.matrix()).trace().real();
}

double real_trace_product(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionMismatch("real_trace_product: inner dimensions differ");
    }
    return (a * b).trace().real();
}

Vector vectorize(const Matrix& a) {
    return Eigen::Map<const Vector>(a.data(), a.size());
}

Matrix devectorize(const Vector& v) {
    const auto n = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (n * n != v.size()) {
        throw DimensionMismatch("devectorize: length is not a perfect square");
    }
    return Eigen::Map<const Matrix>(v.data(), n, n);
}

Matrix hermitian_propagator(const HermitianOperator& h, double t) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
    if (solver.info() != Eigen::Success) {
        throw NotConverged("hermitian_propagator: eigensolver failed");
    }
    const Index n = h.dim();
    Vector phases(n);
    for (Index k = 0; k < n; ++k) {
        phases(k) = std::exp(Complex(0.0, -solver.eigenvalues()(k) * t));
    }
    return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

Matrix magnus_step(const std::function<Matrix(double)>& hamiltonian_of_t, double t0, double dt) {
    const double spread = 0.28867513459481288225 * dt;  // sqrt(3)/6 * dt
    const Matrix h1 = hamiltonian_of_t(t0 + 0.5 * dt - spread);
    const Matrix h2 = hamiltonian_of_t(t0 + 0.5 * dt + spread);
    const Matrix commutator = h2 * h1 - h1 * h2;
    const Matrix m = 0.5 * dt * (h1 + h2) +
                     Complex(0.0, -1.0) * (0.14433756729740644113 * dt * dt) * commutator;
    return hermitian_propagator(HermitianOperator::symmetrized(m, 1e-8), 1.0);
}

namespace {

// Pade numerator coefficients for exp, orders 3..13 (Higham 2005).
Matrix pade_solve(const Matrix& u, const Matrix& v) {
    return (v - u).partialPivLu().solve(v + u);
}

Matrix pade_low(const Matrix& a, const std::vector<double>& b) {
    const Index n = a.rows();
    const Matrix a2 = a * a;
    Matrix u = Matrix::Zero(n, n);
    Matrix v = Matrix::Zero(n, n);
    Matrix power = Matrix::Identity(n, n);  // a^(2k)
    for (size_t k = 0; 2 * k + 1 < b.size(); ++k) {
        u += b[2 * k + 1] * power;
        v += b[2 * k] * power;
        if (2 * (k + 1) < b.size()) power = (power * a2).eval();
    }
    return pade_solve(a * u, v);
}

}  // namespace

Matrix matrix_exponential(const Matrix& a) {
    if (a.rows() != a.cols()) {
        throw DimensionMismatch("matrix_exponential: matrix must be square");
    }
    const Index n = a.rows();
    if (n == 0) return a;

    const double norm = a.cwiseAbs().colwise().sum().maxCoeff();  // 1-norm

    static const std::vector<double> b3 = {120, 60, 12, 1};
    static const std::vector<double> b5 = {30240, 15120, 3360, 420, 30, 1};
    static const std::vector<double> b7 = {17297280, 8648640, 1995840, 277200, 25200, 1512, 56, 1};
    static const std::vector<double> b9 = {17643225600., 8821612800., 2075673600., 302702400.,
                                           30270240., 2162160., 110880., 3960., 90., 1.};
    static const std::vector<double> b13 = {
        64764752532480000., 32382376266240000., 7771770303897600., 1187353796428800.,
        129060195264000.,   10559470521600.,    670442572800.,     33522128640.,
        1323241920.,        40840800.,          960960.,           16380.,
        182.,               1.};

    if (norm <= 1.495585217958292e-2) return pade_low(a, b3);
    if (norm <= 2.539398330063230e-1) return pade_low(a, b5);
    if (norm <= 9.504178996162932e-1) return pade_low(a, b7);
    if (norm <= 2.097847961257068) return pade_low(a, b9);

    const double theta13 = 5.371920351148152;
    int squarings = 0;
    Matrix scaled = a;
    if (norm > theta13) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
        scaled = a / std::pow(2.0, squarings);
    }

    const Matrix a2 = scaled * scaled;
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a2 * a4;
    const Matrix ident = Matrix::Identity(n, n);
    Matrix u = scaled * (a6 * (b13[13] * a6 + b13[11] * a4 + b13[9] * a2) +
                         b13[7] * a6 + b13[5] * a4 + b13[3] * a2 + b13[1] * ident);
    Matrix v = a6 * (b13[12] * a6 + b13[10] * a4 + b13[8] * a2) +
               b13[6] * a6 + b13[4] * a4 + b13[2] * a2 + b13[0] * ident;
    Matrix r = pade_solve(u, v);
    for (int s = 0; s < squarings; ++s) r = (r * r).eval();
    return r;
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Matrix superop_commutator(const Matrix& h) {
    const Index n = h.rows();
    const Matrix ident = Matrix::Identity(n, n);
    const Complex mi(0.0, -1.0);
    return mi * (kronecker(ident, h) - kronecker(h.transpose(), ident));
}

Matrix superop_dissipator(const Matrix& a) {
    const Index n = a.rows();
    const Matrix ident = Matrix::Identity(n, n);
    const Matrix ada = a.adjoint() * a;
    return kronecker(a.conjugate(), a) - 0.5 * kronecker(ident, ada) -
           0.5 * kronecker(ada.transpose(), ident);
}

Matrix superop_conjugation(const Matrix& u) {
    return kronecker(u.conjugate(), u);
}

double trace_norm(const Matrix& a) {
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues().sum();
}

double trace_distance(const DensityOperator& a, const DensityOperator& b) {
    return 0.5 * trace_norm(a.matrix() - b.matrix());
}

Matrix random_hermitian(Index dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(dim, dim);
    for (Index i = 0; i < dim; ++i) {
        for (Index j = 0; j < dim; ++j) {
            g(i, j) = Complex(gauss(rng), gauss(rng));
        }
    }
    return 0.5 * (g + g.adjoint().eval());
}

DensityOperator random_density(Index dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(dim, dim);
    for (Index i = 0; i < dim; ++i) {
        for (Index j = 0; j < dim; ++j) {
            g(i, j) = Complex(gauss(rng), gauss(rng));
        }
    }
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    rho = 0.5 * (rho + rho.adjoint().eval());
    return DensityOperator(std::move(rho));
}

}  // namespace qthermo
