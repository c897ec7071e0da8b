// Cooling-scaling experiments: optimal receiving frequency, cooling-rate
// sweeps against the bath heat capacity, trajectory integration towards
// absolute zero, exponent fits, unattainability verdicts, and the
// thermoelectric current bound.

#pragma once

#include <vector>

#include "qthermo/bath.hpp"

namespace qthermo {

// Cooling current carried by a single received quantum: J(w) = w * gamma(-w),
// the excitation-limited rate times the quantum.
double cooling_current(const BathSpec& bath, double temperature, double omega);

// Maximizes the cooling current over the receiving frequency by golden-section
// search on x = omega/T. Throws OptimizationFailed when no interior maximum
// exists (flat spectra). The ratio omega*/T is temperature independent.
double optimal_receiving_frequency(const BathSpec& bath, double temperature);

// (J_opt, dT/dt) with dT/dt = -J_opt / c_V(T), both at the optimal frequency.
std::pair<double, double> cooling_rate(const BathSpec& bath, double temperature);

struct CoolingPoint {
    double temperature = 0.0;
    double omega_opt = 0.0;
    double current = 0.0;
    double dtdt = 0.0;
};

// Log-spaced temperature sweep of the optimized cooling rate.
std::vector<CoolingPoint> cooling_sweep(const BathSpec& bath, double t_low, double t_high,
                                        int points);

struct CoolingTrajectory {
    std::vector<double> times;
    std::vector<double> temperature;
    std::vector<double> omega_opt;
    std::vector<double> current;
    std::vector<double> dtdt;
    bool reached_floor = false;
    double floor = 0.0;
};

// Adaptive integration of dT/dt = -J_opt(T)/c_V(T) from T0; stops at the
// floor (default 1e-6 * T0) or at t_end.
CoolingTrajectory integrate_cooling(const BathSpec& bath, double t0, double t_end,
                                    double temperature_floor = -1.0);

struct ExponentReport {
    double zeta = 0.0;            // fitted log-log slope of |dT/dt| vs T
    double half_width = 0.0;      // 2-sigma confidence half-width of the slope
    double r_squared = 0.0;
    double alpha = 0.0;           // current exponent - 1 (model input)
    double eta = 0.0;             // heat-capacity exponent (model input)
    double zeta_predicted = 0.0;  // 1 + alpha - eta
    bool fit_valid = false;       // R^2 >= 0.999 gate for any verdict
    bool compliant = false;       // fitted zeta >= 1
};

// Least-squares slope of ln|dT/dt| against ln T. The fit window drops the
// highest temperature decade (pre-asymptotic regime) and requires >= 20
// samples spanning >= 1.5 decades (InsufficientSpan otherwise).
ExponentReport fit_zeta(const std::vector<double>& temperature, const std::vector<double>& dtdt,
                        double alpha, double eta);
ExponentReport fit_zeta(const std::vector<CoolingPoint>& sweep, double alpha, double eta);
ExponentReport fit_zeta(const CoolingTrajectory& trajectory, double alpha, double eta);

// Scaling exponents (alpha, eta) of the supported bath models.
std::pair<double, double> bath_exponents(const BathSpec& bath);

struct UnattainabilityVerdict {
    bool compliant = false;
    // Finite time to reach T = 0 implied by the closed form when zeta < 1
    // (per unit rate constant and unit initial temperature); 0 when compliant.
    double finite_time_to_zero = 0.0;
};

// zeta >= 1 is compliant (exponential approach at the boundary); zeta < 1
// reaches absolute zero in finite time.
UnattainabilityVerdict unattainability_verdict(double zeta);

// Maximum heat current that N_c fermionic scattering channels can carry out
// of a cold bath: (pi^2/6) N_c T_c^2.
double thermoelectric_bound(int channels, double t_cold);

}  // namespace qthermo
