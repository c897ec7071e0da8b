// Weak-coupling thermal generators for static Hamiltonians: Bohr-frequency
// jump operators, generator assembly, Schrodinger/Heisenberg application.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qthermo/bath.hpp"
#include "qthermo/operators.hpp"

namespace qthermo {

// One system-bath coupling S (x) B. S is Hermitian so S_{-w} = S_w^dagger
// holds automatically.
struct CouplingChannel {
    HermitianOperator coupling;
    BathSpec bath;
    std::string bath_id;
};

enum class Provenance { Davies, Floquet, Raw };

// One secular jump pair. `op` is the lowering eigenoperator for the positive
// energy quantum `omega` exchanged with the bath ([H, op] = -omega op); for
// driven generators omega = |quasi-Bohr + q Omega| and the (quasi_omega, q)
// labels record the decomposition.
struct JumpTerm {
    std::string bath_id;
    double omega = 0.0;
    double quasi_omega = 0.0;
    int q = 0;
    Matrix op;
    double gamma_down = 0.0;  // gamma(omega)
    double gamma_up = 0.0;    // gamma(-omega)
    double bath_temperature = 0.0;
    bool work_bath = false;
};

// Zero-frequency (pure dephasing) component; carries no heat.
struct DephasingTerm {
    std::string bath_id;
    Matrix op;  // Hermitian
    double rate = 0.0;
};

struct ThermalGenerator {
    Index dim = 0;
    // Coherent part of the flow; zero for interaction-picture (Floquet)
    // generators where the rotation carries the Hamiltonian evolution.
    Matrix hamiltonian;
    std::vector<JumpTerm> terms;
    std::vector<DephasingTerm> dephasing;
    Provenance provenance = Provenance::Raw;

    // d rho / dt including -i[H, rho].
    Matrix apply_schrodinger(const Matrix& rho) const;
    // Adjoint generator on observables, including +i[H, O].
    Matrix apply_heisenberg(const Matrix& op) const;
    // Dissipative part only.
    Matrix apply_dissipator(const Matrix& rho) const;
    Matrix apply_bath_dissipator(const std::string& bath_id, const Matrix& rho) const;

    Matrix superop() const;             // -i[H,.] + dissipator, dim^2 x dim^2
    Matrix dissipator_superop() const;
    Matrix bath_dissipator_superop(const std::string& bath_id) const;

    // Bath ids in first-appearance order (deterministic).
    std::vector<std::string> bath_ids() const;
    double bath_temperature(const std::string& bath_id) const;
};

// Fourier components of S with respect to the Bohr spectrum of `dec`:
// returns (omega >= 0, S_omega) with S_omega = sum_{eps_l - eps_k = omega}
// P_k S P_l. The omega = 0 entry (if S has a diagonal part) comes first and
// completeness sum_{w>0} (S_w + S_w^+) + S_0 = S holds.
std::vector<std::pair<double, Matrix>> bohr_jump_operators(const HermitianOperator& coupling,
                                                           const SpectralDecomposition& dec,
                                                           double bin_tol = -1.0);

// Assemble the Davies generator for H with the given channels. Throws
// MissingSpectralValue when a Bohr frequency exceeds a bath cutoff.
ThermalGenerator build_generator(const HermitianOperator& hamiltonian,
                                 const std::vector<CouplingChannel>& channels,
                                 double degeneracy_tol = -1.0);

// Z^-1 exp(-H/T).
DensityOperator gibbs_state(const HermitianOperator& hamiltonian, double temperature);

}  // namespace qthermo
