// Master-equation propagation, steady-state extraction, completely positive
// segment maps, and limit-cycle iteration.

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qthermo/davies.hpp"
#include "qthermo/operators.hpp"

namespace qthermo {

struct StepRecord {
    long accepted = 0;
    long rejected = 0;
    double max_trace_drift = 0.0;   // largest per-step |Tr rho - 1| before renormalization
    double min_eigenvalue = 0.0;    // most negative eigenvalue seen at accepted steps
};

struct Trajectory {
    std::vector<double> times;
    std::vector<DensityOperator> states;
    StepRecord steps;
};

struct PropagateOptions {
    double tol = 1e-8;              // embedded-pair tolerance, in [1e-12, 1e-4]
    int samples = 201;              // uniform sample count when sample_times is empty
    std::vector<double> sample_times;
    // Truncation guard: abort with TruncationLeak when the summed population of
    // these levels exceeds guard_threshold.
    std::vector<Index> guard_levels;
    double guard_threshold = 1e-8;
};

// Adaptive embedded Runge-Kutta (Dormand-Prince 5(4)) integration of
// d rho/dt = L(t) rho. Per-step trace drift is logged and renormalized only
// within 1e-10; positivity below -1e-6 aborts with PositivityLoss.
Trajectory propagate(const ThermalGenerator& gen, const DensityOperator& rho0, double t_end,
                     const PropagateOptions& opts = {});
Trajectory propagate(const std::function<Matrix(double)>& superop_of_t,
                     const DensityOperator& rho0, double t_end,
                     const PropagateOptions& opts = {});

// Kernel vector of the vectorized generator: devectorized, Hermitized and
// trace-normalized. Throws DegenerateKernel / NoKernel on rank defects.
DensityOperator steady_state(const ThermalGenerator& gen, double kernel_tol = 1e-8);
DensityOperator steady_state_superop(const Matrix& superop, double kernel_tol = 1e-8);
int kernel_dimension(const Matrix& superop, double kernel_tol = 1e-8);

// Slowest nonzero relaxation rate min{|Re lambda|} outside the kernel; sets
// the 1/gamma scale of the approach to the steady state.
double spectral_gap(const Matrix& superop, double kernel_tol = 1e-8);

// Completely positive trace-preserving map in superoperator form.
struct CPMap {
    Matrix superop;
    std::string provenance;  // "thermal" | "unitary" | "composition"

    Index dim() const;
    Matrix apply(const Matrix& rho) const;
    Matrix choi() const;  // reshuffled superoperator; PSD for a CP map
    double trace_preservation_defect() const;
    double choi_min_eigenvalue() const;
    void validate(double tp_tol = 1e-9, double choi_floor = -1e-8) const;
};

// exp(duration * L) for a fixed-Hamiltonian thermal generator.
CPMap thermal_segment(const ThermalGenerator& gen, double duration);

// Conjugation by the ordered product of piecewise-constant exponentials of
// H(t); the substep count doubles until the map changes by < tol.
CPMap unitary_ramp(const std::function<Matrix(double)>& hamiltonian_of_t, double duration,
                   int substeps = 64, double tol = 1e-9, int substeps_max = 1 << 15);

CPMap compose(const CPMap& after, const CPMap& before);

struct LimitCycleResult {
    DensityOperator fixed_point;
    int iterations = 0;
    std::vector<double> distances;              // ||rho_{n+1} - rho_n||_tr per iteration
    std::vector<double> conditional_entropies;  // S(rho_n | rho*) along the orbit
};

// Fixed-point iteration of a CPTP map; the conditional-entropy record shows
// the monotone contraction towards the limit cycle.
LimitCycleResult iterate_to_limit_cycle(const CPMap& map, const DensityOperator& rho0,
                                        int max_iters = 20000, double tol = 1e-10);

}  // namespace qthermo
