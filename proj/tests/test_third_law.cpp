#include "doctest.h"

#include <cmath>

#include "qthermo/davies.hpp"
#include "qthermo/dynamics.hpp"
#include "qthermo/models.hpp"
#include "qthermo/thermo.hpp"
#include "qthermo/third_law.hpp"

using namespace qthermo;

namespace {

// Least-squares log-log slope, for short series where fit_zeta's sample gate
// does not apply.
double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(std::abs(y[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("optimal receiving frequency of the d=3, kappa=1 harmonic bath") {
    const BathSpec bath = BathSpec::harmonic_field(1.0, 3, 1.0, 1.0, 1e3);

    // Dense-grid oracle for the maximizer of x^4 / (e^x - 1).
    double best_x = 0.0, best_val = -1.0;
    for (int i = 1; i < 60000; ++i) {
        const double x = 1e-3 + i * 1e-3;
        const double val = std::pow(x, 4) / std::expm1(x);
        if (val > best_val) {
            best_val = val;
            best_x = x;
        }
    }
    CHECK(best_x == doctest::Approx(3.921).epsilon(1e-3));  // root of 4(1 - e^-x) = x

    for (double t : {0.01, 0.1, 1.0}) {
        CHECK(optimal_receiving_frequency(bath, t) / t ==
              doctest::Approx(best_x).epsilon(1e-4));
    }
    // Doubling the temperature doubles the optimal frequency.
    const double w1 = optimal_receiving_frequency(bath, 0.05);
    const double w2 = optimal_receiving_frequency(bath, 0.10);
    CHECK(w2 / w1 == doctest::Approx(2.0).epsilon(1e-2));
}

TEST_CASE("Bose-gas receiving frequency is linear in temperature") {
    const BathSpec bath = BathSpec::bose_gas(0.05, 0.01, 0.05, 1.0, 0.12);
    const double ratio_lo = optimal_receiving_frequency(bath, 1e-3) / 1e-3;
    const double ratio_mid = optimal_receiving_frequency(bath, 1e-2) / 1e-2;
    const double ratio_hi = optimal_receiving_frequency(bath, 1e-1) / 1e-1;
    CHECK(ratio_mid == doctest::Approx(ratio_lo).epsilon(1e-2));
    CHECK(ratio_hi == doctest::Approx(ratio_lo).epsilon(1e-2));
}

TEST_CASE("flat spectra have no receiving optimum") {
    CHECK_THROWS_AS(optimal_receiving_frequency(BathSpec::work_bath(1.0), 0.1),
                    OptimizationFailed);
}

TEST_CASE("cooling-rate scaling exponents") {
    const BathSpec harmonic = BathSpec::harmonic_field(1.0, 3, 1.0, 1.0, 1e3);
    std::vector<double> temps, currents, rates;
    for (double t = 1e-3; t <= 1.1e-1; t *= 1.6) {
        const auto [current, dtdt] = cooling_rate(harmonic, t);
        temps.push_back(t);
        currents.push_back(current);
        rates.push_back(dtdt);
    }
    CHECK(log_slope(temps, currents) == doctest::Approx(4.0).epsilon(0.05 / 4.0));
    CHECK(log_slope(temps, rates) == doctest::Approx(1.0).epsilon(0.05));

    const BathSpec bose = BathSpec::bose_gas(0.05, 0.01, 0.05, 1.0, 0.12);
    temps.clear();
    currents.clear();
    rates.clear();
    for (double t = 1e-3; t <= 2.1e-2; t *= 1.6) {  // entirely below T_crit
        const auto [current, dtdt] = cooling_rate(bose, t);
        temps.push_back(t);
        currents.push_back(current);
        rates.push_back(dtdt);
    }
    CHECK(log_slope(temps, rates) == doctest::Approx(1.5).epsilon(0.05 / 1.5));
}

TEST_CASE("cooling sweep vanishes monotonically towards T = 0") {
    for (const BathSpec& bath : {BathSpec::harmonic_field(1.0, 3, 1.0, 1.0, 1e3),
                                 BathSpec::bose_gas(0.05, 0.01, 0.05, 1.0, 0.12)}) {
        const auto sweep = cooling_sweep(bath, 1e-3, 1e-1, 25);
        for (size_t i = 1; i < sweep.size(); ++i) {
            CHECK(sweep[i].current > sweep[i - 1].current);
            CHECK(std::abs(sweep[i].dtdt) > std::abs(sweep[i - 1].dtdt));
        }
        CHECK(sweep.front().current > 0.0);
        CHECK(sweep.front().current < 1e-3);  // already tiny near the floor
    }
}

TEST_CASE("sub-linear rate exponent reaches the floor on the closed-form schedule") {
    // kappa = 1/2 gives dT/dt ~ -c T^{1/2}: T^{1/2} decreases linearly and
    // hits zero at finite time.
    const BathSpec bath = BathSpec::harmonic_field(1.0, 3, 0.5, 1.0, 1e3);
    const CoolingTrajectory traj = integrate_cooling(bath, 0.1, 1e9, 1e-8);
    CHECK(traj.reached_floor);

    // T(t)^{1-zeta} is linear in t: regress and demand R^2 >= 0.9999.
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
    for (size_t i = 0; i < traj.times.size(); ++i) {
        const double x = traj.times[i];
        const double y = std::sqrt(traj.temperature[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        n += 1.0;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    for (size_t i = 0; i < traj.times.size(); ++i) {
        const double fit = intercept + slope * traj.times[i];
        const double y = std::sqrt(traj.temperature[i]);
        ss_res += (y - fit) * (y - fit);
        ss_tot += (y - sy / n) * (y - sy / n);
    }
    CHECK(1.0 - ss_res / ss_tot >= 0.9999);
}

TEST_CASE("kappa = 1 harmonic bath never reaches the floor (unattainability)") {
    const BathSpec bath = BathSpec::harmonic_field(1.0, 3, 1.0, 1.0, 1e3);
    // Exponential approach: T(t) = T0 exp(-c t) stays above 1e-6 T0 for
    // t < ln(1e6)/c. Use a horizon well below that.
    const double c = std::abs(cooling_rate(bath, 0.1).second) / 0.1;
    const CoolingTrajectory traj = integrate_cooling(bath, 0.1, 10.0 / c);
    CHECK_FALSE(traj.reached_floor);
    CHECK(traj.temperature.back() > 1e-6 * 0.1);
    CHECK(traj.temperature.back() < 0.1);
}

TEST_CASE("fit_zeta on synthetic and model data") {
    // Synthetic power law dT/dt = -T^{3/2}.
    std::vector<double> temps, rates;
    for (int i = 0; i < 40; ++i) {
        const double t = 1e-4 * std::pow(10.0, 3.0 * i / 39.0);
        temps.push_back(t);
        rates.push_back(-std::pow(t, 1.5));
    }
    const ExponentReport synthetic = fit_zeta(temps, rates, 2.0, 1.5);
    CHECK(synthetic.zeta == doctest::Approx(1.5).epsilon(0.01 / 1.5));
    CHECK(synthetic.fit_valid);
    CHECK(synthetic.compliant);
    CHECK(synthetic.zeta_predicted == doctest::Approx(1.5));

    // Harmonic d = 3, kappa = 1: alpha = 3, eta = 3 -> zeta = 1.
    const BathSpec harmonic = BathSpec::harmonic_field(1.0, 3, 1.0, 1.0, 1e3);
    const auto sweep = cooling_sweep(harmonic, 1e-3, 1e-1, 40);
    const auto [alpha, eta] = bath_exponents(harmonic);
    const ExponentReport fit = fit_zeta(sweep, alpha, eta);
    CHECK(fit.zeta_predicted == doctest::Approx(1.0));
    CHECK(fit.zeta == doctest::Approx(1.0).epsilon(0.1));

    // Bose gas below T_crit: zeta = 3/2.
    const BathSpec bose = BathSpec::bose_gas(0.05, 0.01, 0.05, 1.0, 0.12);
    const auto bose_sweep = cooling_sweep(bose, 1e-3, 1e-1, 40);
    const auto [alpha_b, eta_b] = bath_exponents(bose);
    const ExponentReport bose_fit = fit_zeta(bose_sweep, alpha_b, eta_b);
    CHECK(bose_fit.zeta_predicted == doctest::Approx(1.5));
    CHECK(bose_fit.zeta == doctest::Approx(1.5).epsilon(0.1 / 1.5));

    CHECK_THROWS_AS(fit_zeta(std::vector<double>{1.0, 2.0}, std::vector<double>{-1.0, -2.0}, 0.0,
                             0.0),
                    InsufficientSpan);
}

TEST_CASE("unattainability verdicts") {
    CHECK(unattainability_verdict(1.5).compliant);
    CHECK(unattainability_verdict(1.0).compliant);
    const UnattainabilityVerdict violation = unattainability_verdict(0.5);
    CHECK_FALSE(violation.compliant);
    CHECK(violation.finite_time_to_zero == doctest::Approx(2.0));
}

TEST_CASE("thermoelectric bound") {
    CHECK(thermoelectric_bound(1, 1.0) == doctest::Approx(1.6449340668).epsilon(1e-9));
    CHECK(thermoelectric_bound(3, 2.0) == doctest::Approx(19.739208802).epsilon(1e-9));
    // Fermi-lead consistency: J ~ T^2 (alpha + 1 = 2) with c_V ~ T gives zeta = 1.
    const double zeta = 1.0 + (2.0 - 1.0) - 1.0;
    CHECK(unattainability_verdict(zeta).compliant);
    CHECK_THROWS_AS(thermoelectric_bound(0, 1.0), DomainError);
}

TEST_CASE("device cross-check: tricycle steady currents reproduce the shortcut exponent") {
    // Power-driven refrigerator regime with the receiving gap tuned to the
    // optimal x* T_c. The cold transition is the bottleneck, so the device
    // current scales like the analytic optimum.
    const BathSpec cold_template = BathSpec::harmonic_field(1.0, 3, 1.0, 10.0, 1e3);
    const double x_star = optimal_receiving_frequency(cold_template, 1.0);

    std::vector<double> temps, device_rates, shortcut_rates;
    for (double t_c : {4e-3, 8e-3, 1.6e-2, 3.2e-2, 6.4e-2}) {
        TricycleSpec spec;
        spec.omega_h = 3.0;
        spec.omega_c = x_star * t_c;
        spec.hot = BathSpec::harmonic_field(0.5, 3, 1.0, 1.0, 1e3);
        BathSpec cold = cold_template;
        cold.temperature = t_c;
        spec.cold = cold;
        spec.work = BathSpec::work_bath(1.0);
        const TricycleModel model = build_tricycle(spec);
        const ThermalGenerator gen = build_generator(model.hamiltonian, model.channels);
        const DensityOperator steady = steady_state(gen, 1e-10);
        const double j_device = heat_current(gen, "cold", steady.matrix());
        CHECK(j_device > 0.0);  // refrigeration

        temps.push_back(t_c);
        device_rates.push_back(j_device / heat_capacity(cold, t_c));
        shortcut_rates.push_back(std::abs(cooling_rate(cold, t_c).second));
    }
    const double zeta_device = log_slope(temps, device_rates);
    const double zeta_shortcut = log_slope(temps, shortcut_rates);
    CHECK(zeta_device == doctest::Approx(zeta_shortcut).epsilon(0.1));
    CHECK(zeta_device == doctest::Approx(1.0).epsilon(0.1));
}
