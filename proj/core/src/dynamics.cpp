#include "qthermo/dynamics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qthermo/entropy.hpp"

namespace qthermo {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
constexpr double kB5[7] = {35.0 / 384, 0.0,          500.0 / 1113, 125.0 / 192,
                           -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr double kB4[7] = {5179.0 / 57600, 0.0,           7571.0 / 16695, 393.0 / 640,
                           -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

using Rhs = std::function<Vector(double, const Vector&)>;

struct Integrator {
    Rhs rhs;
    double tol;
    double h = 0.0;
    StepRecord* record = nullptr;

    double error_norm(const Vector& err, const Vector& y0, const Vector& y1) const {
        double acc = 0.0;
        for (Index i = 0; i < err.size(); ++i) {
            const double scale = tol + tol * std::max(std::abs(y0(i)), std::abs(y1(i)));
            const double e = std::abs(err(i)) / scale;
            acc += e * e;
        }
        return std::sqrt(acc / static_cast<double>(err.size()));
    }

    // Advance y from t to exactly t_target.
    void advance(double& t, Vector& y, double t_target) {
        const double span = std::max(std::abs(t_target - t), 1e-300);
        if (h <= 0.0) {
            const double f0 = rhs(t, y).norm();
            h = std::min(0.1 * span, 0.01 * std::max(y.norm(), 1.0) / std::max(f0, 1e-10));
        }
        long steps = 0;
        while (t < t_target) {
            if (++steps > 50'000'000L) throw NotConverged("propagate: step budget exhausted");
            h = std::min(h, t_target - t);
            if (h < 1e-14 * std::max(1.0, std::abs(t))) {
                throw StepSizeUnderflow("propagate: step size underflow at t = " + std::to_string(t));
            }
            Vector k[7];
            k[0] = rhs(t, y);
            for (int s = 1; s < 7; ++s) {
                Vector ys = y;
                for (int j = 0; j < s; ++j) {
                    if (kA[s][j] != 0.0) ys += h * kA[s][j] * k[j];
                }
                k[s] = rhs(t + kC[s] * h, ys);
            }
            Vector y5 = y;
            Vector err = Vector::Zero(y.size());
            for (int s = 0; s < 7; ++s) {
                if (kB5[s] != 0.0) y5 += h * kB5[s] * k[s];
                const double db = kB5[s] - kB4[s];
                if (db != 0.0) err += h * db * k[s];
            }
            const double norm = error_norm(err, y, y5);
            if (norm <= 1.0) {
                t += h;
                y = std::move(y5);
                if (record) ++record->accepted;
            } else if (record) {
                ++record->rejected;
            }
            const double factor = (norm > 0.0) ? 0.9 * std::pow(norm, -0.2) : 5.0;
            h *= std::clamp(factor, 0.2, 5.0);
        }
    }
};

Trajectory propagate_impl(const Rhs& rhs, const DensityOperator& rho0, double t_end,
                          const PropagateOptions& opts) {
    if (opts.tol < 1e-12 || opts.tol > 1e-4) {
        throw DomainError("propagate: tolerance must lie in [1e-12, 1e-4]");
    }
    if (t_end < 0.0) throw DomainError("propagate: t_end must be >= 0");

    std::vector<double> samples = opts.sample_times;
    if (samples.empty()) {
        const int n = std::max(2, opts.samples);
        samples.resize(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            samples[static_cast<size_t>(i)] = t_end * static_cast<double>(i) / (n - 1);
        }
    }

    Trajectory traj;
    traj.steps.min_eigenvalue = 0.0;
    Integrator stepper{rhs, opts.tol, 0.0, &traj.steps};

    double t = 0.0;
    Vector y = vectorize(rho0.matrix());
    const Index dim = rho0.dim();

    for (double t_sample : samples) {
        if (t_sample < t - 1e-15) throw DomainError("propagate: sample times must ascend");
        if (t_sample > t) stepper.advance(t, y, t_sample);

        Matrix rho = devectorize(y);
        rho = 0.5 * (rho + rho.adjoint().eval());
        const double drift = std::abs(rho.trace().real() - 1.0);
        traj.steps.max_trace_drift = std::max(traj.steps.max_trace_drift, drift);
        if (drift > 1e-10) {
            throw NotConverged("propagate: trace drift " + std::to_string(drift) +
                               " exceeds the renormalization budget");
        }
        rho /= rho.trace().real();

        Eigen::SelfAdjointEigenSolver<Matrix> solver(rho, Eigen::EigenvaluesOnly);
        const double min_eig = solver.eigenvalues().minCoeff();
        traj.steps.min_eigenvalue = std::min(traj.steps.min_eigenvalue, min_eig);
        if (min_eig < -1e-6) {
            throw PositivityLoss("propagate: eigenvalue " + std::to_string(min_eig) +
                                 " at t = " + std::to_string(t_sample));
        }
        if (!opts.guard_levels.empty()) {
            double leak = 0.0;
            for (Index level : opts.guard_levels) leak += rho(level, level).real();
            if (leak > opts.guard_threshold) {
                throw TruncationLeak("propagate: guard-level population " + std::to_string(leak) +
                                     " at t = " + std::to_string(t_sample));
            }
        }
        y = vectorize(rho);
        traj.times.push_back(t_sample);
        traj.states.emplace_back(rho, 1e-12, 1e-10, -1e-8);
        (void)dim;
    }
    return traj;
}

}  // namespace

Trajectory propagate(const ThermalGenerator& gen, const DensityOperator& rho0, double t_end,
                     const PropagateOptions& opts) {
    if (gen.dim != rho0.dim()) throw DimensionMismatch("propagate: generator/state mismatch");
    const Matrix lmat = gen.superop();
    return propagate_impl([&lmat](double, const Vector& y) -> Vector { return lmat * y; },
                          rho0, t_end, opts);
}

Trajectory propagate(const std::function<Matrix(double)>& superop_of_t,
                     const DensityOperator& rho0, double t_end, const PropagateOptions& opts) {
    return propagate_impl(
        [&superop_of_t](double t, const Vector& y) -> Vector { return superop_of_t(t) * y; },
        rho0, t_end, opts);
}

int kernel_dimension(const Matrix& superop, double kernel_tol) {
    Eigen::ComplexEigenSolver<Matrix> solver(superop);
    if (solver.info() != Eigen::Success) throw NotConverged("kernel_dimension: eigensolver failed");
    int count = 0;
    for (Index i = 0; i < solver.eigenvalues().size(); ++i) {
        if (std::abs(solver.eigenvalues()(i)) < kernel_tol) ++count;
    }
    return count;
}

double spectral_gap(const Matrix& superop, double kernel_tol) {
    Eigen::ComplexEigenSolver<Matrix> solver(superop);
    if (solver.info() != Eigen::Success) throw NotConverged("spectral_gap: eigensolver failed");
    double gap = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < solver.eigenvalues().size(); ++i) {
        const Complex lambda = solver.eigenvalues()(i);
        if (std::abs(lambda) < kernel_tol) continue;
        gap = std::min(gap, std::abs(lambda.real()));
    }
    if (std::isinf(gap)) throw NoKernel("spectral_gap: generator has no decaying modes");
    return gap;
}

DensityOperator steady_state_superop(const Matrix& superop, double kernel_tol) {
    Eigen::ComplexEigenSolver<Matrix> solver(superop);
    if (solver.info() != Eigen::Success) throw NotConverged("steady_state: eigensolver failed");

    int kernel = 0;
    Index best = -1;
    double best_mag = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < solver.eigenvalues().size(); ++i) {
        const double mag = std::abs(solver.eigenvalues()(i));
        if (mag < kernel_tol) ++kernel;
        if (mag < best_mag) {
            best_mag = mag;
            best = i;
        }
    }
    if (kernel == 0) {
        throw NoKernel("steady_state: no eigenvalue below the kernel tolerance (closest " +
                       std::to_string(best_mag) + ")");
    }
    if (kernel > 1) {
        throw DegenerateKernel("steady_state: kernel dimension " + std::to_string(kernel));
    }

    Matrix rho = devectorize(solver.eigenvectors().col(best));
    rho = 0.5 * (rho + rho.adjoint().eval());
    const double tr = rho.trace().real();
    if (std::abs(tr) < 1e-10) throw NoKernel("steady_state: kernel vector is traceless");
    rho /= tr;

    const double residual = (superop * vectorize(rho)).cwiseAbs().maxCoeff();
    if (residual > 1e-9) {
        throw NotConverged("steady_state: residual " + std::to_string(residual) + " above 1e-9");
    }
    return DensityOperator(std::move(rho), 1e-11, 1e-10, -1e-9);
}

DensityOperator steady_state(const ThermalGenerator& gen, double kernel_tol) {
    return steady_state_superop(gen.superop(), kernel_tol);
}

Index CPMap::dim() const {
    const auto n = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(superop.rows()))));
    return n;
}

Matrix CPMap::apply(const Matrix& rho) const {
    return devectorize(superop * vectorize(rho));
}

Matrix CPMap::choi() const {
    const Index d = dim();
    Matrix c(d * d, d * d);
    for (Index k = 0; k < d; ++k) {
        for (Index i = 0; i < d; ++i) {
            for (Index l = 0; l < d; ++l) {
                for (Index j = 0; j < d; ++j) {
                    c(k * d + i, l * d + j) = superop(i + d * j, k + d * l);
                }
            }
        }
    }
    return c;
}

double CPMap::trace_preservation_defect() const {
    const Index d = dim();
    const Vector vec_id = vectorize(Matrix::Identity(d, d));
    return (superop.adjoint() * vec_id - vec_id).cwiseAbs().maxCoeff();
}

double CPMap::choi_min_eigenvalue() const {
    Matrix c = choi();
    c = 0.5 * (c + c.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(c, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

void CPMap::validate(double tp_tol, double choi_floor) const {
    const double tp = trace_preservation_defect();
    if (tp > tp_tol) {
        throw NotConverged("CPMap: trace-preservation defect " + std::to_string(tp));
    }
    const double floor = choi_min_eigenvalue();
    if (floor < choi_floor) {
        throw PositivityLoss("CPMap: Choi eigenvalue " + std::to_string(floor));
    }
}

CPMap thermal_segment(const ThermalGenerator& gen, double duration) {
    if (duration < 0.0) throw DomainError("thermal_segment: duration must be >= 0");
    CPMap map;
    map.provenance = "thermal";
    if (duration == 0.0) {
        map.superop = Matrix::Identity(gen.dim * gen.dim, gen.dim * gen.dim);
        return map;
    }
    map.superop = matrix_exponential(duration * gen.superop());
    return map;
}

CPMap unitary_ramp(const std::function<Matrix(double)>& hamiltonian_of_t, double duration,
                   int substeps, double tol, int substeps_max) {
    if (duration < 0.0) throw DomainError("unitary_ramp: duration must be >= 0");
    const Matrix h0 = hamiltonian_of_t(0.0);
    const Index d = h0.rows();

    CPMap map;
    map.provenance = "unitary";
    if (duration == 0.0) {
        map.superop = Matrix::Identity(d * d, d * d);
        return map;
    }

    auto ordered_product = [&](int n) {
        Matrix u = Matrix::Identity(d, d);
        const double dt = duration / n;
        for (int k = 0; k < n; ++k) {
            u = (magnus_step(hamiltonian_of_t, k * dt, dt) * u).eval();
        }
        return u;
    };

    int n = std::max(substeps, 2);
    Matrix u = ordered_product(n);
    while (true) {
        const Matrix u2 = ordered_product(2 * n);
        const double change = (u2 - u).cwiseAbs().maxCoeff();
        u = u2;
        n *= 2;
        if (change < tol) break;
        if (n > substeps_max) {
            throw NotConverged("unitary_ramp: no convergence at " + std::to_string(n) +
                               " substeps (change " + std::to_string(change) + ")");
        }
    }
    map.superop = superop_conjugation(u);
    return map;
}

CPMap compose(const CPMap& after, const CPMap& before) {
    if (after.superop.cols() != before.superop.rows()) {
        throw DimensionMismatch("compose: map dimensions differ");
    }
    CPMap map;
    map.superop = after.superop * before.superop;
    map.provenance = "composition";
    return map;
}

LimitCycleResult iterate_to_limit_cycle(const CPMap& map, const DensityOperator& rho0,
                                        int max_iters, double tol) {
    std::vector<Matrix> orbit;
    std::vector<double> distances;
    orbit.push_back(rho0.matrix());

    Matrix current = rho0.matrix();
    int iterations = -1;
    for (int n = 0; n < max_iters; ++n) {
        Matrix next = map.apply(current);
        next = 0.5 * (next + next.adjoint().eval());
        next /= next.trace().real();
        const double dist = trace_norm(next - current);
        distances.push_back(dist);
        current = std::move(next);
        if (dist < tol) {
            iterations = n;
            break;
        }
        orbit.push_back(current);
    }
    if (iterations < 0) {
        throw MaxItersExceeded("iterate_to_limit_cycle: no fixed point after " +
                               std::to_string(max_iters) + " iterations");
    }

    DensityOperator fixed(current, 1e-11, 1e-10, -1e-8);
    std::vector<double> entropies;
    entropies.reserve(orbit.size());
    for (const Matrix& rho : orbit) {
        double s;
        try {
            s = conditional_entropy(DensityOperator(rho, 1e-11, 1e-9, -1e-7), fixed);
        } catch (const Error&) {
            s = std::numeric_limits<double>::quiet_NaN();
        }
        entropies.push_back(s);
    }
    return LimitCycleResult{std::move(fixed), iterations, std::move(distances),
                            std::move(entropies)};
}

}  // namespace qthermo
