// Floquet machinery for periodically driven systems: monodromy and
// quasi-energies, the double Fourier decomposition of coupling operators,
// and the driven thermal generator in the interaction picture.
//
// Internal convention: U(t,0)^+ S U(t,0) = sum_entries exp(-i(w + q W) t) op
// plus adjoints, where each stored entry has quasi-Bohr frequency w >= 0 and
// `op` lowers the quasi-energy. The physical quantum exchanged with a bath is
// w + q W (W = 2 pi / period).

#pragma once

#include <functional>
#include <vector>

#include "qthermo/davies.hpp"
#include "qthermo/operators.hpp"

namespace qthermo {

struct PeriodicHamiltonian {
    std::function<Matrix(double)> hamiltonian;  // t -> H(t), H(t + period) = H(t)
    double period = 0.0;
    std::function<Matrix(double)> derivative;   // optional analytic dH/dt

    Matrix at(double t) const { return hamiltonian(t); }
    Index dim() const { return hamiltonian(0.0).rows(); }
    double omega() const;  // driving frequency 2 pi / period
};

struct FloquetBasis {
    double period = 0.0;
    Matrix monodromy;                 // U(period, 0)
    RealVector quasi_energies;        // folded to (-W/2, W/2], ascending
    std::vector<Matrix> projectors;   // onto quasi-energy clusters
    int substeps = 0;                 // converged piecewise-constant resolution

    double drive_frequency() const;
    Matrix effective_hamiltonian() const;  // sum_k eps_k P_k
};

// Monodromy through ordered midpoint exponentials; the substep count doubles
// until U changes by < tol (NotConverged beyond substeps_max).
FloquetBasis compute_monodromy(const PeriodicHamiltonian& ph, int substeps = 64,
                               double tol = 1e-8, int substeps_max = 1 << 16,
                               double degeneracy_tol = -1.0);

// Fold a frequency into the first Brillouin zone (-W/2, W/2]; idempotent.
double fold_to_zone(double omega, double drive_frequency);

// U(k * period / n, 0) for k = 0..n.
std::vector<Matrix> propagator_grid(const PeriodicHamiltonian& ph, int n);

// O(1)-ish evaluation of U(t,0) for arbitrary t >= 0 from cached partial
// products over one period.
class PropagatorCache {
public:
    PropagatorCache(const PeriodicHamiltonian& ph, int substeps);
    Matrix at(double t) const;

private:
    const PeriodicHamiltonian ph_;
    std::vector<Matrix> partials_;
    Matrix monodromy_;
    double period_;
    int substeps_;
};

struct FloquetJumpSet {
    struct Entry {
        double omega = 0.0;  // quasi-Bohr frequency, >= 0
        int q = 0;
        Matrix op;
    };
    Index dim = 0;
    std::vector<Entry> entries;  // may be empty when q_max misses every harmonic
    double residual = 0.0;       // max-abs reconstruction defect on the grid
    int q_max = 0;
    int grid_points = 0;

    // sum_entries exp(-i(w+qW)t) op + adjoints, evaluated at time t.
    Matrix reconstruct(double t, double drive_frequency) const;
};

// Double Fourier decomposition of U^+ S U over one period, projected on
// quasi-energy sectors. Throws TruncationError when the reconstruction
// residual exceeds residual_tol (q_max insufficient).
FloquetJumpSet floquet_jump_operators(const HermitianOperator& coupling,
                                      const PeriodicHamiltonian& ph, const FloquetBasis& basis,
                                      int q_max, int grid_points, double residual_tol = 1e-7);

struct FloquetOptions {
    int substeps = 64;
    double monodromy_tol = 1e-8;
    int substeps_max = 1 << 16;
    int q_max = 1;            // starting harmonic truncation
    bool adaptive = true;     // grow q_max until the residual gate passes
    int q_hard_max = 40;
    double residual_tol = 1e-7;
    double degeneracy_tol = -1.0;
};

struct FloquetGenerator {
    ThermalGenerator generator;  // interaction picture: hamiltonian part is zero
    FloquetBasis basis;
    std::vector<FloquetJumpSet> jumpsets;  // one per channel, in channel order
};

// Driven thermal generator: rates gamma_j(w + qW) with detailed-balance
// partners, assembled per channel. Throws MissingSpectralValue when a
// sideband frequency exceeds a bath cutoff.
FloquetGenerator build_floquet_generator(const PeriodicHamiltonian& ph,
                                         const std::vector<CouplingChannel>& channels,
                                         const FloquetOptions& opts = {});

// Instantaneous dissipator in the Schrodinger picture at time t, as a
// superoperator: L(t) = U(t) L U(t)^+. The coherent part -i[H(t), .] is not
// included (it lives in the master equation, not the dissipator).
Matrix rotate_to_schrodinger(const FloquetGenerator& gen, const PeriodicHamiltonian& ph, double t);
Matrix rotate_dissipator_superop(const Matrix& dissipator_superop, const Matrix& u);

// Circular distance between the two quasi-energies of a two-level basis.
double quasi_energy_splitting(const FloquetBasis& basis);

}  // namespace qthermo
