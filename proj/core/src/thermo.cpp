#include "qthermo/thermo.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace qthermo {

namespace {

constexpr double kZeroEigenvalue = 1e-14;

// ln rho on the support of rho, eigenvalues below the zero threshold clamped.
Matrix matrix_log_clamped(const Matrix& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(rho);
    Vector logs(solver.eigenvalues().size());
    for (Index k = 0; k < solver.eigenvalues().size(); ++k) {
        const double p = std::max(solver.eigenvalues()(k), kZeroEigenvalue);
        logs(k) = std::log(p);
    }
    return solver.eigenvectors() * logs.asDiagonal() * solver.eigenvectors().adjoint();
}

void require_heat_defined(const ThermalGenerator& gen) {
    if (gen.provenance == Provenance::Raw) {
        throw GaugeError("heat currents are defined only for Davies/Floquet generators");
    }
}

}  // namespace

double heat_current(const ThermalGenerator& gen, const std::string& bath_id, const Matrix& rho) {
    require_heat_defined(gen);
    if (gen.provenance != Provenance::Davies) {
        throw GaugeError("heat_current: use floquet_currents for driven generators");
    }
    return real_trace_product(gen.apply_bath_dissipator(bath_id, rho), gen.hamiltonian);
}

double external_power(const Matrix& rho, const Matrix& dhdt) {
    return real_trace_product(rho, dhdt);
}

double floquet_current(const ThermalGenerator& gen, const std::string& bath_id,
                       const Matrix& rho) {
    require_heat_defined(gen);
    double current = 0.0;
    for (const auto& term : gen.terms) {
        if (term.bath_id != bath_id) continue;
        const double flux_down = term.gamma_down * real_trace_product(term.op * rho, term.op.adjoint());
        const double flux_up =
            term.gamma_up * real_trace_product(term.op.adjoint() * rho, term.op);
        current += term.omega * (flux_up - flux_down);
    }
    return current;
}

std::vector<std::pair<std::string, double>> floquet_currents(const ThermalGenerator& gen,
                                                             const Matrix& rho) {
    std::vector<std::pair<std::string, double>> currents;
    for (const auto& id : gen.bath_ids()) {
        currents.emplace_back(id, floquet_current(gen, id, rho));
    }
    return currents;
}

double entropy_production(const ThermalGenerator& gen, const DensityOperator& rho) {
    require_heat_defined(gen);
    const Matrix log_rho = matrix_log_clamped(rho.matrix());
    const double ds_dt = -real_trace_product(gen.apply_dissipator(rho.matrix()), log_rho);

    double flow = 0.0;
    for (const auto& id : gen.bath_ids()) {
        double temperature = gen.bath_temperature(id);
        if (std::isinf(temperature)) continue;  // work bath: zero entropy flux
        flow += floquet_current(gen, id, rho.matrix()) / temperature;
    }
    return ds_dt - flow;
}

SteadyAudit second_law_check(const std::vector<std::pair<std::string, double>>& currents,
                             const std::map<std::string, double>& temperatures,
                             const std::string& hot_id, const std::string& cold_id,
                             const std::string& work_id, double tol) {
    SteadyAudit audit;
    double flow = 0.0;
    for (const auto& [id, current] : currents) {
        const auto it = temperatures.find(id);
        if (it == temperatures.end()) {
            throw DomainError("second_law_check: no temperature for bath '" + id + "'");
        }
        if (std::isinf(it->second)) continue;
        flow += current / it->second;
    }
    audit.entropy_flow = flow;
    audit.second_law.name = "II-law (steady)";
    audit.second_law.inequality = "sum_j J_j/T_j <= 0";
    audit.second_law.measured = flow;
    audit.second_law.status = (flow <= tol) ? VerdictStatus::Pass : VerdictStatus::Fail;

    audit.carnot.name = "Carnot bound";
    audit.carnot.inequality = "(-J_w)/J_h <= 1 - T_c/T_h";
    audit.carnot.status = VerdictStatus::NotApplicable;
    if (!hot_id.empty() && !cold_id.empty() && !work_id.empty()) {
        double j_hot = 0.0, j_work = 0.0;
        for (const auto& [id, current] : currents) {
            if (id == hot_id) j_hot = current;
            if (id == work_id) j_work = current;
        }
        const double t_hot = temperatures.at(hot_id);
        const double t_cold = temperatures.at(cold_id);
        audit.carnot_limit = 1.0 - t_cold / t_hot;
        if (j_hot > tol && -j_work > tol) {
            audit.engine = true;
            audit.efficiency = -j_work / j_hot;
            audit.carnot.measured = audit.efficiency;
            audit.carnot.status = (audit.efficiency <= audit.carnot_limit + tol)
                                      ? VerdictStatus::Pass
                                      : VerdictStatus::Fail;
        }
    }
    return audit;
}

namespace {

void integrate_cumulative(ThermoLedger& ledger) {
    const size_t baths = ledger.bath_ids.size();
    ledger.cumulative_heat.assign(baths, 0.0);
    ledger.work = 0.0;
    for (size_t i = 1; i < ledger.rows.size(); ++i) {
        const LedgerRow& a = ledger.rows[i - 1];
        const LedgerRow& b = ledger.rows[i];
        const double dt = b.t - a.t;
        for (size_t j = 0; j < baths; ++j) {
            ledger.cumulative_heat[j] += 0.5 * dt * (a.currents[j] + b.currents[j]);
        }
        ledger.work += 0.5 * dt * (a.power + b.power);
    }
}

}  // namespace

ThermoLedger build_ledger(const ThermalGenerator& gen, const Trajectory& traj) {
    require_heat_defined(gen);
    ThermoLedger ledger;
    ledger.bath_ids = gen.bath_ids();
    const HermitianOperator h(gen.hamiltonian);
    const SpectralDecomposition dec = eigendecompose(h);

    ledger.rows.reserve(traj.times.size());
    for (size_t i = 0; i < traj.times.size(); ++i) {
        const DensityOperator& rho = traj.states[i];
        LedgerRow row;
        row.t = traj.times[i];
        row.energy = expectation(rho, h);
        row.entropy_vn = entropy_vn(rho);
        row.entropy_energy = entropy_energy(rho, dec);
        row.power = 0.0;
        for (const auto& id : ledger.bath_ids) {
            row.currents.push_back(heat_current(gen, id, rho.matrix()));
        }
        row.sigma = entropy_production(gen, rho);
        ledger.rows.push_back(std::move(row));
    }
    integrate_cumulative(ledger);
    return ledger;
}

ThermoLedger build_ledger_driven(const FloquetGenerator& fgen, const PeriodicHamiltonian& ph,
                                 const Trajectory& traj) {
    const ThermalGenerator& gen = fgen.generator;
    ThermoLedger ledger;
    ledger.bath_ids = gen.bath_ids();
    PropagatorCache cache(ph, fgen.basis.substeps);
    const double fd_step = 1e-6 * ph.period;

    ledger.rows.reserve(traj.times.size());
    for (size_t i = 0; i < traj.times.size(); ++i) {
        const double t = traj.times[i];
        const DensityOperator& rho = traj.states[i];
        const Matrix h_t = ph.at(t);
        const Matrix u = cache.at(t);
        const Matrix rho_int = u.adjoint() * rho.matrix() * u;
        const Matrix h_int = u.adjoint() * h_t * u;

        LedgerRow row;
        row.t = t;
        row.energy = real_trace_product(rho.matrix(), h_t);
        row.entropy_vn = entropy_vn(rho);
        row.entropy_energy = entropy_energy(rho, HermitianOperator::symmetrized(h_t));

        Matrix dhdt;
        if (ph.derivative) {
            dhdt = ph.derivative(t);
        } else {
            // central difference, O(h^2)
            dhdt = (ph.at(t + fd_step) - ph.at(std::max(t - fd_step, 0.0))) /
                   (t < fd_step ? fd_step : 2.0 * fd_step);
        }
        row.power = external_power(rho.matrix(), dhdt);

        for (const auto& id : ledger.bath_ids) {
            row.currents.push_back(
                real_trace_product(gen.apply_bath_dissipator(id, rho_int), h_int));
        }

        const Matrix log_rho = matrix_log_clamped(rho_int);
        double sigma = -real_trace_product(gen.apply_dissipator(rho_int), log_rho);
        for (const auto& id : ledger.bath_ids) {
            const double temperature = gen.bath_temperature(id);
            if (std::isinf(temperature)) continue;
            sigma -= floquet_current(gen, id, rho_int) / temperature;
        }
        row.sigma = sigma;
        ledger.rows.push_back(std::move(row));
    }
    integrate_cumulative(ledger);
    return ledger;
}

FrictionSeries friction_and_adiabaticity(const Trajectory& traj,
                                         const std::function<Matrix(double)>& hamiltonian_of_t,
                                         double fd_step) {
    FrictionSeries series;
    if (traj.times.empty()) return series;
    double h = fd_step;
    if (h <= 0.0) {
        const double span = traj.times.back() - traj.times.front();
        h = (span > 0.0) ? 1e-6 * span : 1e-8;
    }

    auto gaps_at = [&](double t) {
        const HermitianOperator ht = HermitianOperator::symmetrized(hamiltonian_of_t(t));
        Eigen::SelfAdjointEigenSolver<Matrix> solver(ht.matrix(), Eigen::EigenvaluesOnly);
        return RealVector(solver.eigenvalues());
    };

    for (size_t i = 0; i < traj.times.size(); ++i) {
        const double t = traj.times[i];
        const HermitianOperator ht = HermitianOperator::symmetrized(hamiltonian_of_t(t));
        const double gap = entropy_energy(traj.states[i], ht) - entropy_vn(traj.states[i]);

        const RealVector eps_minus = gaps_at(std::max(t - h, traj.times.front()));
        const RealVector eps_plus = gaps_at(t + h);
        const double denom = (t - h < traj.times.front()) ? h : 2.0 * h;
        double mu = 0.0;
        for (Index a = 0; a < eps_plus.size(); ++a) {
            for (Index b = a + 1; b < eps_plus.size(); ++b) {
                const double w = 0.5 * ((eps_plus(b) - eps_plus(a)) + (eps_minus(b) - eps_minus(a)));
                if (std::abs(w) < 1e-9) {
                    throw VanishingGap("friction_and_adiabaticity: spectral gap below 1e-9");
                }
                const double wdot = ((eps_plus(b) - eps_plus(a)) - (eps_minus(b) - eps_minus(a))) / denom;
                mu += std::abs(wdot) / (w * w);
            }
        }
        series.times.push_back(t);
        series.entropy_gap.push_back(gap);
        series.mu.push_back(mu);
        series.mu_max = std::max(series.mu_max, mu);
    }
    return series;
}

}  // namespace qthermo
