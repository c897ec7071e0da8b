// Independent oracles used by the test suites: quadrature for special
// functions and scattering rates, rate-equation steady states for the
// tricycle, and small numeric helpers. Everything here deliberately avoids
// the library's own evaluation paths.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>

namespace oracles {

constexpr double kPi = 3.14159265358979323846;

// Adaptive Simpson quadrature; the depth cap bounds the node tree when the
// requested tolerance saturates at machine precision.
inline double simpson_recurse(const std::function<double(double)>& f, double a, double b,
                              double fa, double fm, double fb, double whole, double tol,
                              int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0) return left + right;
    if (std::abs(left + right - whole) < 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_recurse(f, a, b, fa, fm, fb, whole, tol, 20);
}

// K1 from its integral representation, integrated in the scaled form
//   e^x K1(x) = int_0^inf exp(-x (cosh t - 1)) cosh t dt
// so the integrand is O(1) and an absolute tolerance controls the relative
// error for every x.
inline double bessel_k1_quadrature(double x) {
    if (!(x > 0.0)) throw std::domain_error("bessel_k1_quadrature: x must be > 0");
    const double t_max = std::acosh(1.0 + 60.0 / x);
    const double scaled = integrate(
        [x](double t) { return std::exp(-x * (std::cosh(t) - 1.0)) * std::cosh(t); }, 0.0, t_max,
        1e-13 * std::max(1.0, 1.0 / x));
    return std::exp(-x) * scaled;
}

// Low-density scattering rate reduced to its radial form:
//   gamma = 2 pi n (4 pi a_s / m)^2 * 4 pi m * (2 pi m T)^{-3/2}
//           * 4 pi int_0^inf p^2 sqrt(p^2 + 2 m w) exp(-p^2/(2 m T)) dp,
// the delta function of the energy balance having fixed |p'|.
inline double bose_gamma_quadrature(double density, double a_s, double mass, double temperature,
                                    double omega, double critical_temperature) {
    double n_eff = density;
    if (temperature < critical_temperature) {
        n_eff *= std::pow(temperature / critical_temperature, 1.5);
    }
    const double p_scale = std::sqrt(2.0 * mass * temperature);
    const double p_max = 9.0 * p_scale;  // exp(-81) tail
    const double magnitude =
        p_scale * p_scale * p_scale * std::sqrt(p_scale * p_scale + 2.0 * mass * omega);
    const double radial = integrate(
        [mass, temperature, omega](double p) {
            return p * p * std::sqrt(p * p + 2.0 * mass * omega) *
                   std::exp(-p * p / (2.0 * mass * temperature));
        },
        0.0, p_max, 1e-11 * magnitude);
    const double t_matrix = 4.0 * kPi * a_s / mass;
    return 2.0 * kPi * n_eff * t_matrix * t_matrix * 4.0 * kPi * mass *
           std::pow(2.0 * kPi * mass * temperature, -1.5) * 4.0 * kPi * radial;
}

// Population rate equations for the three-level junction: hot on 0<->2,
// cold on 0<->1, work on 1<->2. Returns steady populations and the three
// currents (into the system).
struct TricycleRates {
    double hot_up, hot_down;    // 0 -> 2 and 2 -> 0
    double cold_up, cold_down;  // 0 -> 1 and 1 -> 0
    double work_up, work_down;  // 1 -> 2 and 2 -> 1
};

struct TricycleSteady {
    Eigen::Vector3d populations;
    double current_hot, current_cold, current_work;
};

inline TricycleSteady tricycle_rate_equations(const TricycleRates& r, double omega_h,
                                              double omega_c) {
    Eigen::Matrix3d m;
    // d p0/dt, d p1/dt rows plus normalization.
    m << -(r.cold_up + r.hot_up), r.cold_down, r.hot_down,
         r.cold_up, -(r.cold_down + r.work_up), r.work_down,
         1.0, 1.0, 1.0;
    Eigen::Vector3d b(0.0, 0.0, 1.0);
    const Eigen::Vector3d p = m.partialPivLu().solve(b);
    TricycleSteady steady;
    steady.populations = p;
    const double omega_w = omega_h - omega_c;
    steady.current_hot = omega_h * (r.hot_up * p(0) - r.hot_down * p(2));
    steady.current_cold = omega_c * (r.cold_up * p(0) - r.cold_down * p(1));
    steady.current_work = omega_w * (r.work_up * p(1) - r.work_down * p(2));
    return steady;
}

}  // namespace oracles
