// Ready-made physical models: two-level system, truncated oscillator, the
// three-level tricycle, the circularly driven TLS, and the four-stroke Otto
// cycle.

#pragma once

#include <string>
#include <vector>

#include "qthermo/davies.hpp"
#include "qthermo/dynamics.hpp"
#include "qthermo/floquet.hpp"

namespace qthermo {

Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();

struct TlsModel {
    HermitianOperator hamiltonian;  // diag(0, omega0)
    HermitianOperator coupling;     // sigma_x
    double omega0 = 0.0;
};
TlsModel build_tls(double omega0);

struct OscillatorModel {
    HermitianOperator hamiltonian;  // diag(k * omega), k = 0..n_max-1
    HermitianOperator coupling;     // a + a^+ truncated
    double omega = 0.0;
    Index n_max = 0;

    // Population in these levels must stay < 1e-8 or the truncation leaks.
    std::vector<Index> guard_levels() const;
};
OscillatorModel build_oscillator(double omega, Index n_max);

// Three-level junction carrying hot, cold and work currents. Levels
// (0, omega_c, omega_h); hot bath on 0<->2, cold on 0<->1, work on 1<->2
// (gap omega_w = omega_h - omega_c). The same wiring acts as an engine for
// omega_c/T_c > omega_h/T_h and as a power-driven refrigerator otherwise.
struct TricycleSpec {
    double omega_h = 3.0;
    double omega_c = 2.0;
    BathSpec hot;
    BathSpec cold;
    BathSpec work;
    double g_h = 1.0;  // channel coupling amplitudes
    double g_c = 1.0;
    double g_w = 1.0;

    double omega_w() const { return omega_h - omega_c; }
    void validate() const;
};

struct TricycleModel {
    HermitianOperator hamiltonian;
    std::vector<CouplingChannel> channels;  // ids "hot", "cold", "work"
    TricycleSpec spec;
};
TricycleModel build_tricycle(const TricycleSpec& spec);

// H(t) = (omega0/2) sigma_z + g (cos Wt sigma_x + sin Wt sigma_y); the
// rotating frame is exact, quasi-energy splitting sqrt(Delta^2 + 4 g^2) with
// Delta = omega0 - W.
PeriodicHamiltonian build_driven_tls(double omega0, double g, double drive_frequency);

// Commuting drive H(t) = (omega0/2 + g cos Wt) sigma_z; dressed basis equals
// the bare one, sideband weights are Bessel functions of 2g/W.
PeriodicHamiltonian build_tls_gap_modulation(double omega0, double g, double drive_frequency);

struct OttoSpec {
    std::string medium = "tls";  // "tls" | "oscillator"
    double omega_cold = 1.0;     // medium frequency endpoints, omega_cold < omega_hot
    double omega_hot = 2.0;
    // Fixed transverse field on the TLS medium; nonzero makes the adiabats
    // noncommuting and generates friction. Ignored for the oscillator, whose
    // quadrature form is noncommuting by itself.
    double transverse = 0.0;
    BathSpec hot_bath;
    BathSpec cold_bath;
    double tau_hot = 5.0;   // isochore durations
    double tau_cold = 5.0;
    double tau_hc = 2.0;    // adiabat (ramp) durations; 0 = sudden quench
    double tau_ch = 2.0;
    std::string schedule = "linear";  // "linear" | "smooth"
    Index n_max = 12;                 // oscillator truncation

    void validate() const;
};

// Cycle start is the beginning of the hot isochore. Segments in application
// order: hot isochore, hot->cold ramp, cold isochore, cold->hot ramp.
struct OttoCycle {
    OttoSpec spec;
    std::vector<CPMap> segments;
    CPMap cycle;  // composition, applied as one stroke
    Matrix h_hot;
    Matrix h_cold;

    std::function<Matrix(double)> ramp_hc() const;  // H(t) along hot->cold
    std::function<Matrix(double)> ramp_ch() const;
};
OttoCycle build_otto_cycle(const OttoSpec& spec);

struct CycleLedger {
    double q_hot = 0.0;   // heat absorbed on the hot isochore
    double q_cold = 0.0;  // heat absorbed on the cold isochore
    double work = 0.0;    // work done on the medium across both adiabats
    double efficiency = 0.0;  // engine: -W/Q_h; refrigerator: Q_c/W
};

// Per-cycle energy bookkeeping starting from `start`; also returns the state
// after one full cycle through `end` when non-null.
CycleLedger cycle_ledger(const OttoCycle& cycle, const DensityOperator& start,
                         DensityOperator* end = nullptr);

}  // namespace qthermo
