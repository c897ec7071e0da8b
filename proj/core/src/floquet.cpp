#include "qthermo/floquet.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qthermo {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

Matrix ordered_product(const PeriodicHamiltonian& ph, double t_end, int n) {
    const Index d = ph.dim();
    Matrix u = Matrix::Identity(d, d);
    const double dt = t_end / n;
    for (int k = 0; k < n; ++k) {
        u = (magnus_step(ph.hamiltonian, k * dt, dt) * u).eval();
    }
    return u;
}

}  // namespace

double PeriodicHamiltonian::omega() const {
    if (!(period > 0.0)) throw DomainError("PeriodicHamiltonian: period must be > 0");
    return kTwoPi / period;
}

double FloquetBasis::drive_frequency() const { return kTwoPi / period; }

Matrix FloquetBasis::effective_hamiltonian() const {
    const Index d = monodromy.rows();
    Matrix h = Matrix::Zero(d, d);
    for (Index k = 0; k < quasi_energies.size(); ++k) {
        h += quasi_energies(k) * projectors[static_cast<size_t>(k)];
    }
    return h;
}

double fold_to_zone(double omega, double drive_frequency) {
    double folded = std::remainder(omega, drive_frequency);
    if (folded <= -0.5 * drive_frequency) folded += drive_frequency;
    return folded;
}

std::vector<Matrix> propagator_grid(const PeriodicHamiltonian& ph, int n) {
    const Index d = ph.dim();
    std::vector<Matrix> grid;
    grid.reserve(static_cast<size_t>(n) + 1);
    grid.push_back(Matrix::Identity(d, d));
    const double dt = ph.period / n;
    for (int k = 0; k < n; ++k) {
        grid.push_back((magnus_step(ph.hamiltonian, k * dt, dt) * grid.back()).eval());
    }
    return grid;
}

FloquetBasis compute_monodromy(const PeriodicHamiltonian& ph, int substeps, double tol,
                               int substeps_max, double degeneracy_tol) {
    if (!(ph.period > 0.0)) throw DomainError("compute_monodromy: period must be > 0");
    int n = std::max(substeps, 64);
    Matrix u = ordered_product(ph, ph.period, n);
    while (true) {
        const Matrix u2 = ordered_product(ph, ph.period, 2 * n);
        const double change = (u2 - u).cwiseAbs().maxCoeff();
        u = u2;
        n *= 2;
        if (change < tol) break;
        if (n > substeps_max) {
            throw NotConverged("compute_monodromy: doubling test stuck at change " +
                               std::to_string(change));
        }
    }

    const double drive = kTwoPi / ph.period;
    Eigen::ComplexSchur<Matrix> schur(u);
    if (schur.info() != Eigen::Success) {
        throw NotConverged("compute_monodromy: Schur decomposition failed");
    }
    const Index d = u.rows();
    std::vector<double> eps(static_cast<size_t>(d));
    for (Index k = 0; k < d; ++k) {
        eps[static_cast<size_t>(k)] = fold_to_zone(-std::arg(schur.matrixT()(k, k)) / ph.period, drive);
    }

    // Cluster folded quasi-energies; Schur vectors of a unitary are orthonormal.
    double ctol = degeneracy_tol;
    if (ctol < 0.0) ctol = 1e-9 * drive;
    std::vector<Index> order(static_cast<size_t>(d));
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&eps](Index a, Index b) {
        return eps[static_cast<size_t>(a)] < eps[static_cast<size_t>(b)];
    });

    FloquetBasis basis;
    basis.period = ph.period;
    basis.monodromy = u;
    basis.substeps = n;
    std::vector<double> merged;
    size_t start = 0;
    while (start < order.size()) {
        size_t stop = start + 1;
        while (stop < order.size() && eps[static_cast<size_t>(order[stop])] -
                                              eps[static_cast<size_t>(order[stop - 1])] <=
                                          ctol) {
            ++stop;
        }
        Matrix proj = Matrix::Zero(d, d);
        double value = 0.0;
        for (size_t i = start; i < stop; ++i) {
            const Index col = order[i];
            proj += schur.matrixU().col(col) * schur.matrixU().col(col).adjoint();
            value += eps[static_cast<size_t>(col)];
        }
        proj = 0.5 * (proj + proj.adjoint().eval());
        merged.push_back(value / static_cast<double>(stop - start));
        basis.projectors.push_back(std::move(proj));
        start = stop;
    }
    // Quasi-energies live on a circle: merge the first and last clusters when
    // they touch across the zone boundary.
    if (merged.size() > 1 &&
        (merged.front() + 0.5 * drive) + (0.5 * drive - merged.back()) <= ctol) {
        basis.projectors.front() += basis.projectors.back();
        basis.projectors.pop_back();
        merged.front() = 0.5 * drive;
        merged.pop_back();
    }
    basis.quasi_energies =
        Eigen::Map<const RealVector>(merged.data(), static_cast<Index>(merged.size()));
    return basis;
}

PropagatorCache::PropagatorCache(const PeriodicHamiltonian& ph, int substeps)
    : ph_(ph), period_(ph.period), substeps_(std::max(substeps, 1)) {
    partials_ = propagator_grid(ph_, substeps_);
    monodromy_ = partials_.back();
}

Matrix PropagatorCache::at(double t) const {
    if (t < 0.0) throw DomainError("PropagatorCache: t must be >= 0");
    const auto cycles = static_cast<long>(std::floor(t / period_ + 1e-12));
    double s = t - static_cast<double>(cycles) * period_;
    if (s < 0.0) s = 0.0;
    const double dt = period_ / substeps_;
    auto idx = static_cast<size_t>(std::floor(s / dt + 1e-12));
    if (idx > static_cast<size_t>(substeps_)) idx = static_cast<size_t>(substeps_);
    Matrix u = partials_[idx];
    const double rem = s - static_cast<double>(idx) * dt;
    if (rem > 1e-13 * period_) {
        u = (magnus_step(ph_.hamiltonian, static_cast<double>(idx) * dt, rem) * u).eval();
    }
    for (long c = 0; c < cycles; ++c) u = (u * monodromy_).eval();
    return u;
}

Matrix FloquetJumpSet::reconstruct(double t, double drive_frequency) const {
    if (dim <= 0) throw DomainError("FloquetJumpSet: dimension not set");
    Matrix out = Matrix::Zero(dim, dim);
    for (const auto& entry : entries) {
        const double w_eff = entry.omega + entry.q * drive_frequency;
        const Complex phase = std::exp(Complex(0.0, -w_eff * t));
        out += phase * entry.op;
        if (!(entry.omega == 0.0 && entry.q == 0)) {
            out += std::conj(phase) * entry.op.adjoint();
        }
    }
    return out;
}

namespace {

FloquetJumpSet jump_set_impl(const HermitianOperator& coupling, const PeriodicHamiltonian& ph,
                             const FloquetBasis& basis, int q_max, int grid_points) {
    const Index d = coupling.dim();
    const double drive = basis.drive_frequency();
    const int n_grid = grid_points;

    const std::vector<Matrix> grid = propagator_grid(ph, n_grid);
    std::vector<Matrix> s_interaction(static_cast<size_t>(n_grid));
    for (int n = 0; n < n_grid; ++n) {
        const Matrix& u = grid[static_cast<size_t>(n)];
        s_interaction[static_cast<size_t>(n)] = u.adjoint() * coupling.matrix() * u;
    }

    const Index levels = basis.quasi_energies.size();
    const double bin_tol = 1e-9 * drive;

    FloquetJumpSet set;
    set.dim = d;
    set.q_max = q_max;
    set.grid_points = n_grid;

    // omega bins over cluster pairs (a <= b in folded order).
    struct Bin {
        double omega;
        std::vector<Matrix> coeffs;  // index q + q_max
        bool diagonal;
    };
    std::vector<Bin> bins;
    const double dt = ph.period / n_grid;
    for (Index a = 0; a < levels; ++a) {
        for (Index b = a; b < levels; ++b) {
            const double omega = basis.quasi_energies(b) - basis.quasi_energies(a);
            // Fourier coefficients of exp(+i omega t) P_a S(t) P_b over q.
            std::vector<Matrix> coeffs(static_cast<size_t>(2 * q_max + 1),
                                       Matrix::Zero(d, d));
            for (int n = 0; n < n_grid; ++n) {
                const double t = n * dt;
                const Matrix block = basis.projectors[static_cast<size_t>(a)] *
                                     s_interaction[static_cast<size_t>(n)] *
                                     basis.projectors[static_cast<size_t>(b)];
                for (int q = -q_max; q <= q_max; ++q) {
                    const Complex phase = std::exp(Complex(0.0, (omega + q * drive) * t));
                    coeffs[static_cast<size_t>(q + q_max)] += phase * block;
                }
            }
            for (auto& c : coeffs) c /= static_cast<double>(n_grid);

            bool merged = false;
            for (auto& bin : bins) {
                if (std::abs(bin.omega - omega) <= bin_tol && bin.diagonal == (a == b)) {
                    for (size_t i = 0; i < coeffs.size(); ++i) bin.coeffs[i] += coeffs[i];
                    merged = true;
                    break;
                }
            }
            if (!merged) bins.push_back(Bin{omega, std::move(coeffs), a == b});
        }
    }

    for (auto& bin : bins) {
        for (int q = -q_max; q <= q_max; ++q) {
            if (bin.diagonal && q < 0) continue;  // adjoint partners of q > 0
            Matrix op = bin.coeffs[static_cast<size_t>(q + q_max)];
            if (op.cwiseAbs().maxCoeff() < 1e-12) continue;
            if (bin.diagonal && q == 0) op = 0.5 * (op + op.adjoint().eval());
            set.entries.push_back(FloquetJumpSet::Entry{bin.diagonal ? 0.0 : bin.omega, q,
                                                        std::move(op)});
        }
    }

    double residual = 0.0;
    for (int n = 0; n < n_grid; ++n) {
        const Matrix rec = set.reconstruct(n * dt, drive);
        residual = std::max(
            residual, (rec - s_interaction[static_cast<size_t>(n)]).cwiseAbs().maxCoeff());
    }
    set.residual = residual;
    return set;
}

}  // namespace

FloquetJumpSet floquet_jump_operators(const HermitianOperator& coupling,
                                      const PeriodicHamiltonian& ph, const FloquetBasis& basis,
                                      int q_max, int grid_points, double residual_tol) {
    if (q_max < 1) throw DomainError("floquet_jump_operators: q_max must be >= 1");
    if (grid_points < 8 * q_max) {
        throw DomainError("floquet_jump_operators: grid_points must be >= 8 * q_max");
    }
    if (coupling.dim() != ph.dim()) {
        throw DimensionMismatch("floquet_jump_operators: coupling/Hamiltonian mismatch");
    }
    FloquetJumpSet set = jump_set_impl(coupling, ph, basis, q_max, grid_points);
    if (set.residual > residual_tol) {
        throw TruncationError("floquet_jump_operators: reconstruction residual " +
                              std::to_string(set.residual) + " exceeds " +
                              std::to_string(residual_tol) + " (q_max insufficient)");
    }
    return set;
}

FloquetGenerator build_floquet_generator(const PeriodicHamiltonian& ph,
                                         const std::vector<CouplingChannel>& channels,
                                         const FloquetOptions& opts) {
    FloquetBasis basis = compute_monodromy(ph, opts.substeps, opts.monodromy_tol,
                                           opts.substeps_max, opts.degeneracy_tol);
    const double drive = basis.drive_frequency();
    const Index d = ph.dim();

    ThermalGenerator gen;
    gen.dim = d;
    gen.hamiltonian = Matrix::Zero(d, d);
    gen.provenance = Provenance::Floquet;

    std::vector<FloquetJumpSet> jumpsets;
    for (const auto& channel : channels) {
        int q = std::max(opts.q_max, 1);
        FloquetJumpSet set;
        while (true) {
            const int grid = std::max({64, 8 * q, basis.substeps});
            set = jump_set_impl(channel.coupling, ph, basis, q, grid);
            if (set.residual <= opts.residual_tol) break;
            if (!opts.adaptive || q >= opts.q_hard_max) {
                throw TruncationError("build_floquet_generator: channel '" + channel.bath_id +
                                      "' residual " + std::to_string(set.residual) +
                                      " at q_max " + std::to_string(q));
            }
            q = std::min(2 * q, opts.q_hard_max);
        }

        // Quasi-Bohr frequencies live in [0, W) after folding, so w + qW = 0
        // can only come from the (w = 0, q = 0) Hermitian entry; any
        // quasi-degenerate pair within tolerance was already merged into a
        // single bin upstream.
        const double zero_tol = 1e-9 * drive;
        for (const auto& entry : set.entries) {
            double w_eff = entry.omega + entry.q * drive;
            Matrix op = entry.op;
            double quasi = entry.omega;
            int harmonic = entry.q;
            if (std::abs(w_eff) <= zero_tol) {
                DephasingTerm deph;
                deph.bath_id = channel.bath_id;
                deph.op = 0.5 * (op + op.adjoint().eval());
                deph.rate = channel.bath.gamma(0.0);
                gen.dephasing.push_back(std::move(deph));
                continue;
            }
            if (w_eff < 0.0) {  // normalize to a positive quantum
                w_eff = -w_eff;
                op = op.adjoint().eval();
                quasi = -quasi;
                harmonic = -harmonic;
            }
            JumpTerm term;
            term.bath_id = channel.bath_id;
            term.omega = w_eff;
            term.quasi_omega = quasi;
            term.q = harmonic;
            term.op = std::move(op);
            try {
                term.gamma_down = channel.bath.gamma(w_eff);
                term.gamma_up = channel.bath.gamma(-w_eff);
            } catch (const FrequencyOutOfRange& e) {
                throw MissingSpectralValue("build_floquet_generator: bath '" + channel.bath_id +
                                           "' cannot supply sideband frequency: " + e.what());
            }
            term.bath_temperature = channel.bath.temperature;
            term.work_bath = channel.bath.is_work();
            gen.terms.push_back(std::move(term));
        }
        jumpsets.push_back(std::move(set));
    }
    return FloquetGenerator{std::move(gen), std::move(basis), std::move(jumpsets)};
}

Matrix rotate_dissipator_superop(const Matrix& dissipator_superop, const Matrix& u) {
    const Matrix s = superop_conjugation(u);
    return s * dissipator_superop * s.adjoint();
}

Matrix rotate_to_schrodinger(const FloquetGenerator& gen, const PeriodicHamiltonian& ph,
                             double t) {
    PropagatorCache cache(ph, gen.basis.substeps);
    return rotate_dissipator_superop(gen.generator.dissipator_superop(), cache.at(t));
}

double quasi_energy_splitting(const FloquetBasis& basis) {
    if (basis.quasi_energies.size() != 2) {
        throw DomainError("quasi_energy_splitting: defined for two quasi-levels");
    }
    const double drive = basis.drive_frequency();
    const double gap = std::abs(basis.quasi_energies(1) - basis.quasi_energies(0));
    return std::min(gap, drive - gap);
}

}  // namespace qthermo
