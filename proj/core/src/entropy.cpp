#include "qthermo/entropy.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace qthermo {

namespace {

constexpr double kZeroEigenvalue = 1e-14;

double shannon(const RealVector& p) {
    double s = 0.0;
    for (Index i = 0; i < p.size(); ++i) {
        if (p(i) > kZeroEigenvalue) s -= p(i) * std::log(p(i));
    }
    return s;
}

}  // namespace

double entropy_vn(const DensityOperator& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(rho.matrix(), Eigen::EigenvaluesOnly);
    return shannon(solver.eigenvalues());
}

double entropy_energy(const DensityOperator& rho, const SpectralDecomposition& dec) {
    if (rho.dim() != dec.dim) {
        throw DimensionMismatch("entropy_energy: state and spectrum dimensions differ");
    }
    RealVector p(dec.levels());
    for (Index k = 0; k < dec.levels(); ++k) {
        p(k) = (dec.projectors[static_cast<size_t>(k)] * rho.matrix()).trace().real();
    }
    return shannon(p);
}

double entropy_energy(const DensityOperator& rho, const HermitianOperator& h) {
    return entropy_energy(rho, eigendecompose(h));
}

double conditional_entropy(const DensityOperator& rho, const DensityOperator& sigma) {
    if (rho.dim() != sigma.dim()) {
        throw DimensionMismatch("conditional_entropy: dimensions differ");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> ref(sigma.matrix());
    if (ref.eigenvalues().minCoeff() < kZeroEigenvalue) {
        throw SingularReference("conditional_entropy: reference state is rank deficient");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> own(rho.matrix());

    double tr_rho_ln_rho = 0.0;
    for (Index k = 0; k < own.eigenvalues().size(); ++k) {
        const double p = own.eigenvalues()(k);
        if (p > kZeroEigenvalue) tr_rho_ln_rho += p * std::log(p);
    }
    double tr_rho_ln_sigma = 0.0;
    for (Index k = 0; k < ref.eigenvalues().size(); ++k) {
        const double weight =
            (ref.eigenvectors().col(k).adjoint() * rho.matrix() * ref.eigenvectors().col(k))(0, 0)
                .real();
        tr_rho_ln_sigma += weight * std::log(ref.eigenvalues()(k));
    }
    return tr_rho_ln_rho - tr_rho_ln_sigma;
}

}  // namespace qthermo
