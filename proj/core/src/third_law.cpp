#include "qthermo/third_law.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qthermo {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kGolden = 0.61803398874989484820;

// Scale-invariant search window in x = omega/T.
constexpr double kXLow = 1e-3;
constexpr double kXHigh = 60.0;

}  // namespace

double cooling_current(const BathSpec& bath, double temperature, double omega) {
    BathSpec at_t = bath;
    at_t.temperature = temperature;
    return omega * at_t.gamma(-omega);
}

double optimal_receiving_frequency(const BathSpec& bath, double temperature) {
    if (!(temperature > 0.0)) throw DomainError("optimal_receiving_frequency: T must be > 0");

    double x_hi = kXHigh;
    if (bath.kind == BathKind::HarmonicField) {
        x_hi = std::min(x_hi, 0.999 * bath.cutoff / temperature);
    }
    if (x_hi <= kXLow) {
        throw OptimizationFailed("optimal_receiving_frequency: empty search window");
    }

    auto objective = [&](double x) { return cooling_current(bath, temperature, x * temperature); };

    // Golden-section maximization on [kXLow, x_hi].
    double a = kXLow, b = x_hi;
    double c = b - kGolden * (b - a);
    double d = a + kGolden * (b - a);
    double fc = objective(c), fd = objective(d);
    for (int iter = 0; iter < 200 && (b - a) > 1e-12 * x_hi; ++iter) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kGolden * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kGolden * (b - a);
            fd = objective(d);
        }
    }
    const double x_star = 0.5 * (a + b);
    // Reject boundary maxima: monotone objectives have no receiving optimum.
    if (x_star < kXLow * 1.05 || x_star > x_hi * 0.95) {
        throw OptimizationFailed("optimal_receiving_frequency: no interior maximum (x = " +
                                 std::to_string(x_star) + ")");
    }
    return x_star * temperature;
}

std::pair<double, double> cooling_rate(const BathSpec& bath, double temperature) {
    const double omega_star = optimal_receiving_frequency(bath, temperature);
    const double current = cooling_current(bath, temperature, omega_star);
    BathSpec at_t = bath;
    at_t.temperature = temperature;
    const double dtdt = -current / heat_capacity(at_t, temperature);
    return {current, dtdt};
}

std::vector<CoolingPoint> cooling_sweep(const BathSpec& bath, double t_low, double t_high,
                                        int points) {
    if (!(t_low > 0.0) || !(t_high > t_low)) throw DomainError("cooling_sweep: bad range");
    if (points < 2) throw DomainError("cooling_sweep: need at least 2 points");
    std::vector<CoolingPoint> sweep(static_cast<size_t>(points));
    const double log_lo = std::log(t_low);
    const double log_hi = std::log(t_high);
    for (int i = 0; i < points; ++i) {
        const double t = std::exp(log_lo + (log_hi - log_lo) * i / (points - 1));
        CoolingPoint& p = sweep[static_cast<size_t>(i)];
        p.temperature = t;
        p.omega_opt = optimal_receiving_frequency(bath, t);
        p.current = cooling_current(bath, t, p.omega_opt);
        BathSpec at_t = bath;
        at_t.temperature = t;
        p.dtdt = -p.current / heat_capacity(at_t, t);
    }
    return sweep;
}

CoolingTrajectory integrate_cooling(const BathSpec& bath, double t0, double t_end,
                                    double temperature_floor) {
    double floor = temperature_floor;
    if (floor < 0.0) floor = 1e-6 * t0;
    if (!(t0 > floor) || !(floor > 0.0)) {
        throw DomainError("integrate_cooling: requires T0 > floor > 0");
    }

    CoolingTrajectory traj;
    traj.floor = floor;

    auto rate = [&bath](double temperature) {
        return cooling_rate(bath, temperature).second;  // dT/dt < 0
    };
    auto record = [&](double time, double temperature) {
        const double omega = optimal_receiving_frequency(bath, temperature);
        traj.times.push_back(time);
        traj.temperature.push_back(temperature);
        traj.omega_opt.push_back(omega);
        traj.current.push_back(cooling_current(bath, temperature, omega));
        traj.dtdt.push_back(rate(temperature));
    };

    // Embedded RK45 (Cash-Karp style step doubling on a scalar): simple
    // half-step comparison with PI-free control is plenty here.
    double time = 0.0;
    double temperature = t0;
    record(time, temperature);
    double h = 1e-3 / std::max(std::abs(rate(t0)) / t0, 1e-12);
    const double rel_tol = 1e-9;
    long guard = 0;
    while (time < t_end && temperature > floor) {
        if (++guard > 20'000'000L) throw NotConverged("integrate_cooling: step budget exhausted");
        h = std::min(h, t_end - time);
        if (h < 1e-14 * std::max(time, 1.0)) {
            throw StepSizeUnderflow("integrate_cooling: step underflow at t = " +
                                    std::to_string(time));
        }
        auto rk4 = [&rate](double temp, double step) {
            const double k1 = rate(temp);
            const double k2 = rate(temp + 0.5 * step * k1);
            const double k3 = rate(temp + 0.5 * step * k2);
            const double k4 = rate(temp + step * k3);
            return temp + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        };
        // A full step vs two half steps gives an O(h^5) error estimate. The
        // error scale is anchored to the initial temperature so the step does
        // not collapse as the floor is approached.
        const double full = rk4(temperature, h);
        const double half = rk4(rk4(temperature, 0.5 * h), 0.5 * h);
        const double err = std::abs(full - half) / std::max(std::abs(half), 1e-3 * t0);
        if (err <= rel_tol) {
            time += h;
            temperature = half;
            if (temperature <= floor) {
                temperature = floor;
                traj.reached_floor = true;
            }
            record(time, temperature);
            if (traj.reached_floor) break;
        }
        const double shrink = (err > 0.0) ? 0.9 * std::pow(rel_tol / err, 0.2) : 4.0;
        h *= std::clamp(shrink, 0.2, 4.0);
    }
    return traj;
}

ExponentReport fit_zeta(const std::vector<double>& temperature, const std::vector<double>& dtdt,
                        double alpha, double eta) {
    if (temperature.size() != dtdt.size()) {
        throw DimensionMismatch("fit_zeta: series lengths differ");
    }
    // Entry gates on the raw samples: at least 20 points spanning 1.5 decades.
    std::vector<double> raw_x;
    for (size_t i = 0; i < temperature.size(); ++i) {
        if (temperature[i] > 0.0 && std::abs(dtdt[i]) > 0.0) {
            raw_x.push_back(std::log(temperature[i]));
        }
    }
    if (raw_x.size() < 20) {
        throw InsufficientSpan("fit_zeta: needs >= 20 samples (got " +
                               std::to_string(raw_x.size()) + ")");
    }
    const auto [raw_lo, raw_hi] = std::minmax_element(raw_x.begin(), raw_x.end());
    if ((*raw_hi - *raw_lo) < 1.5 * std::log(10.0)) {
        throw InsufficientSpan("fit_zeta: samples span fewer than 1.5 decades");
    }

    // Drop the highest decade: scaling laws are T -> 0 statements.
    double t_max = 0.0;
    for (double t : temperature) t_max = std::max(t_max, t);
    std::vector<double> x, y;
    for (size_t i = 0; i < temperature.size(); ++i) {
        if (temperature[i] > 0.1 * t_max) continue;
        if (std::abs(dtdt[i]) <= 0.0) continue;
        x.push_back(std::log(temperature[i]));
        y.push_back(std::log(std::abs(dtdt[i])));
    }
    if (x.size() < 5) {
        throw InsufficientSpan("fit_zeta: too few samples below the top decade (" +
                               std::to_string(x.size()) + ")");
    }

    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;

    double ss_res = 0.0, ss_tot = 0.0;
    const double mean_y = sy / n;
    for (size_t i = 0; i < x.size(); ++i) {
        const double fit = intercept + slope * x[i];
        ss_res += (y[i] - fit) * (y[i] - fit);
        ss_tot += (y[i] - mean_y) * (y[i] - mean_y);
    }
    const double sigma2 = (x.size() > 2) ? ss_res / (n - 2.0) : 0.0;

    ExponentReport report;
    report.zeta = slope;
    report.half_width = 2.0 * std::sqrt(sigma2 * n / denom);
    report.r_squared = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
    report.alpha = alpha;
    report.eta = eta;
    report.zeta_predicted = 1.0 + alpha - eta;
    report.fit_valid = report.r_squared >= 0.999;
    report.compliant = report.fit_valid && report.zeta >= 1.0 - 1e-9;
    return report;
}

ExponentReport fit_zeta(const std::vector<CoolingPoint>& sweep, double alpha, double eta) {
    std::vector<double> t, d;
    t.reserve(sweep.size());
    d.reserve(sweep.size());
    for (const auto& p : sweep) {
        t.push_back(p.temperature);
        d.push_back(p.dtdt);
    }
    return fit_zeta(t, d, alpha, eta);
}

ExponentReport fit_zeta(const CoolingTrajectory& trajectory, double alpha, double eta) {
    return fit_zeta(trajectory.temperature, trajectory.dtdt, alpha, eta);
}

std::pair<double, double> bath_exponents(const BathSpec& bath) {
    switch (bath.kind) {
        case BathKind::HarmonicField:
            return {static_cast<double>(bath.dimension) + bath.kappa - 1.0,
                    static_cast<double>(bath.dimension)};
        case BathKind::BoseGas:
            return {2.0, 1.5};  // below the critical temperature
        case BathKind::FermiGasScaling:
            return {1.0, 1.0};
        case BathKind::WorkBath:
            throw Unsupported("bath_exponents: undefined for the work bath");
    }
    throw Unsupported("bath_exponents: unknown bath kind");
}

UnattainabilityVerdict unattainability_verdict(double zeta) {
    UnattainabilityVerdict verdict;
    verdict.compliant = zeta >= 1.0;
    if (!verdict.compliant) {
        // T^{1-zeta} decreases linearly, hitting zero at t* = T0^{1-zeta}/(c (1-zeta)).
        verdict.finite_time_to_zero = 1.0 / (1.0 - zeta);
    }
    return verdict;
}

double thermoelectric_bound(int channels, double t_cold) {
    if (channels < 1) throw DomainError("thermoelectric_bound: channels must be >= 1");
    if (!(t_cold > 0.0)) throw DomainError("thermoelectric_bound: T_c must be > 0");
    return kPi * kPi / 6.0 * static_cast<double>(channels) * t_cold * t_cold;
}

}  // namespace qthermo
