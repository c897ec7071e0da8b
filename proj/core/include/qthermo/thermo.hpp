// Thermodynamic bookkeeping: heat currents, power, entropy production, the
// law audits, trajectory ledgers, and friction/adiabaticity diagnostics.
//
// Sign convention: currents are positive when energy flows from the bath into
// the system, so dE/dt = P + sum_j J_j.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "qthermo/davies.hpp"
#include "qthermo/dynamics.hpp"
#include "qthermo/entropy.hpp"
#include "qthermo/floquet.hpp"

namespace qthermo {

// J_j = Tr{(L_j rho) H}. Defined only for generators with Davies provenance
// (the gauge freedom V -> V + i c makes heat ill-defined otherwise).
double heat_current(const ThermalGenerator& gen, const std::string& bath_id, const Matrix& rho);

// P = Tr{rho dH/dt}.
double external_power(const Matrix& rho, const Matrix& dhdt);

// Flux-form currents: each jump term contributes its energy quantum
// (omega + q W) times the net rate of quanta absorbed from the bath. Equals
// heat_current for static (q = 0) generators and stays finite at quasi-Bohr
// frequency zero. `rho` is in the generator's own picture (interaction
// picture for Floquet generators).
std::vector<std::pair<std::string, double>> floquet_currents(const ThermalGenerator& gen,
                                                             const Matrix& rho);
double floquet_current(const ThermalGenerator& gen, const std::string& bath_id,
                       const Matrix& rho);

// sigma = dS_vn/dt - sum_j J_j / T_j >= 0 (Spohn). dS_vn/dt is evaluated
// analytically as -Tr{(L rho) ln rho}; work baths carry zero entropy flux.
double entropy_production(const ThermalGenerator& gen, const DensityOperator& rho);

enum class VerdictStatus { Pass, Fail, NotApplicable };

struct LawVerdict {
    std::string name;
    VerdictStatus status = VerdictStatus::NotApplicable;
    double measured = 0.0;
    std::string inequality;  // the violated (or audited) inequality
};

struct SteadyAudit {
    double entropy_flow = 0.0;  // sum_j J_j / T_j
    LawVerdict second_law;
    LawVerdict carnot;
    bool engine = false;
    double efficiency = 0.0;
    double carnot_limit = 0.0;
};

// Audit steady currents against sum_j J_j/T_j <= 0 and, when hot/cold/work
// roles are provided and the device produces work, the Carnot bound
// (-J_w)/J_h <= 1 - T_c/T_h.
SteadyAudit second_law_check(const std::vector<std::pair<std::string, double>>& currents,
                             const std::map<std::string, double>& temperatures,
                             const std::string& hot_id = "", const std::string& cold_id = "",
                             const std::string& work_id = "", double tol = 1e-9);

struct LedgerRow {
    double t = 0.0;
    double energy = 0.0;
    double entropy_vn = 0.0;
    double entropy_energy = 0.0;
    std::vector<double> currents;  // aligned with ThermoLedger::bath_ids
    double power = 0.0;
    double sigma = 0.0;
};

struct ThermoLedger {
    std::vector<std::string> bath_ids;
    std::vector<LedgerRow> rows;
    std::vector<double> cumulative_heat;  // trapezoid integrals per bath
    double work = 0.0;                    // integral of the power
};

// Ledger for a static-Hamiltonian trajectory (P = 0).
ThermoLedger build_ledger(const ThermalGenerator& gen, const Trajectory& traj);

// Ledger for a driven trajectory recorded in the Schrodinger picture. The
// current columns hold the instantaneous Tr{(L_j(t) rho) H(t)} so the I-law
// balance closes pointwise; sigma uses the dressed flux currents for which
// Spohn's inequality holds.
ThermoLedger build_ledger_driven(const FloquetGenerator& fgen, const PeriodicHamiltonian& ph,
                                 const Trajectory& traj);

struct FrictionSeries {
    std::vector<double> times;
    std::vector<double> entropy_gap;  // S_E - S_vn >= 0
    std::vector<double> mu;           // adiabatic parameter
    double mu_max = 0.0;
};

// Friction diagnostics along a unitary segment: the energy-entropy excess and
// the adiabatic parameter mu = sum_{i<j} |d w_ij/dt| / w_ij^2 on the
// instantaneous spectrum. Throws VanishingGap below 1e-9.
FrictionSeries friction_and_adiabaticity(const Trajectory& traj,
                                         const std::function<Matrix(double)>& hamiltonian_of_t,
                                         double fd_step = -1.0);

}  // namespace qthermo
