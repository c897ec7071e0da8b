// Entropy functionals on states: von Neumann, observable (energy) entropy,
// and the conditional entropy driving the contraction arguments.

#pragma once

#include "qthermo/operators.hpp"

namespace qthermo {

// -Tr rho ln rho with the 0 ln 0 := 0 convention (eigenvalues below 1e-14
// are treated as exact zeros).
double entropy_vn(const DensityOperator& rho);

// Shannon entropy of the measurement outcomes of H: populations taken against
// the (degeneracy-merged) eigenprojectors. Dominates entropy_vn pointwise.
double entropy_energy(const DensityOperator& rho, const SpectralDecomposition& dec);
double entropy_energy(const DensityOperator& rho, const HermitianOperator& h);

// S(rho|sigma) = Tr rho (ln rho - ln sigma) >= 0. Throws SingularReference
// when sigma is rank deficient.
double conditional_entropy(const DensityOperator& rho, const DensityOperator& sigma);

}  // namespace qthermo
