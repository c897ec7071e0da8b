// Acceptance suite: one check per release criterion, each printed as a
// single PASS/FAIL line with the measured value. The binary exits with the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "qthermo/dynamics.hpp"
#include "qthermo/models.hpp"
#include "qthermo/scenario.hpp"
#include "qthermo/thermo.hpp"
#include "qthermo/third_law.hpp"

using namespace qthermo;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int g_failures = 0;

void run(int number, const std::string& title, const std::function<Outcome()>& check) {
    Outcome outcome;
    try {
        outcome = check();
    } catch (const std::exception& e) {
        outcome.pass = false;
        outcome.detail = std::string("exception: ") + e.what();
    }
    if (!outcome.pass) ++g_failures;
    std::printf("[%s] criterion %2d: %s — %s\n", outcome.pass ? "PASS" : "FAIL", number,
                title.c_str(), outcome.detail.c_str());
    std::fflush(stdout);
}

double seconds_since(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

// ---------------------------------------------------------------------------

Outcome gibbs_thermalization() {
    const auto start = std::chrono::steady_clock::now();
    const TlsModel tls = build_tls(1.0);
    const BathSpec bath = BathSpec::harmonic_field(1.0, 3, 1.0, 1.0);
    const ThermalGenerator gen = build_generator(tls.hamiltonian, {{tls.coupling, bath, "b"}});
    const double gamma = spectral_gap(gen.superop());  // slowest relaxation rate
    const DensityOperator gibbs = gibbs_state(tls.hamiltonian, 1.0);

    PropagateOptions opts;
    opts.tol = 1e-10;
    opts.samples = 2;
    std::mt19937_64 rng(2026);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const Trajectory traj = propagate(gen, random_density(2, rng), 20.0 / gamma, opts);
        worst = std::max(worst, trace_distance(traj.states.back(), gibbs));
    }
    const double elapsed = seconds_since(start);
    Outcome outcome;
    outcome.pass = (worst < 1e-8) && (elapsed < 5.0);
    outcome.detail = "max trace distance " + fmt(worst) + " (tol 1e-8), runtime " + fmt(elapsed) +
                     " s (< 5 s)";
    return outcome;
}

Outcome kms_detailed_balance() {
    const BathSpec harmonic = BathSpec::harmonic_field(0.8, 3, 1.0, 1.0, 50.0);
    const BathSpec bose = BathSpec::bose_gas(0.05, 0.01, 0.05, 1.0, 0.12);
    double worst = 0.0;
    for (int i = 1; i <= 20; ++i) {
        const double omega_h = 50.0 * i / 20.0 * 0.999;
        worst = std::max(worst, std::abs(harmonic.gamma(-omega_h) / harmonic.gamma(omega_h) /
                                             std::exp(-omega_h / 0.8) -
                                         1.0));
        const double omega_b = 0.5 * i / 20.0;
        worst = std::max(worst, std::abs(bose.gamma(-omega_b) / bose.gamma(omega_b) /
                                             std::exp(-omega_b / 0.05) -
                                         1.0));
    }
    Outcome outcome;
    outcome.pass = worst < 1e-12;
    outcome.detail = "max relative KMS defect " + fmt(worst) + " (tol 1e-12, 20-point grids)";
    return outcome;
}

Outcome first_law_driven() {
    const PeriodicHamiltonian ph = build_driven_tls(1.0, 0.25, 0.8);
    const TlsModel tls = build_tls(1.0);
    const BathSpec bath = BathSpec::harmonic_field(1.0, 3, 1.0, 1.0);
    const FloquetGenerator fgen = build_floquet_generator(ph, {{tls.coupling, bath, "b"}});

    const Matrix dissipator = fgen.generator.dissipator_superop();
    PropagatorCache cache(ph, fgen.basis.substeps);
    auto rhs = [&](double t) {
        return Matrix(superop_commutator(ph.at(t)) +
                      rotate_dissipator_superop(dissipator, cache.at(t)));
    };
    PropagateOptions opts;
    opts.tol = 1e-10;
    opts.samples = 801;
    const Trajectory traj = propagate(rhs, gibbs_state(tls.hamiltonian, 1.0), 10.0, opts);
    const ThermoLedger ledger = build_ledger_driven(fgen, ph, traj);

    const double h = ledger.rows[1].t - ledger.rows[0].t;
    double worst = 0.0;
    for (size_t i = 2; i + 2 < ledger.rows.size(); ++i) {
        const double dedt = (ledger.rows[i - 2].energy - 8.0 * ledger.rows[i - 1].energy +
                             8.0 * ledger.rows[i + 1].energy - ledger.rows[i + 2].energy) /
                            (12.0 * h);
        const double scale =
            std::max({std::abs(ledger.rows[i].power), std::abs(ledger.rows[i].currents[0]), 1.0});
        worst = std::max(
            worst, std::abs(dedt - ledger.rows[i].power - ledger.rows[i].currents[0]) / scale);
    }
    Outcome outcome;
    outcome.pass = worst < 1e-6;
    outcome.detail = "max |dE/dt - P - J| / scale = " + fmt(worst) + " (tol 1e-6)";
    return outcome;
}

Outcome spohn_and_steady_second_law() {
    // Part one: sigma >= -1e-9 on 100 random state/generator pairs.
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> temp(0.2, 4.0);
    double min_sigma = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 100; ++i) {
        const Matrix h = random_hermitian(4, rng);
        const Matrix s = random_hermitian(4, rng);
        const BathSpec bath = BathSpec::harmonic_field(temp(rng), 3, 1.0, 1.0, 1e4);
        const ThermalGenerator gen =
            build_generator(HermitianOperator(h), {{HermitianOperator(s), bath, "b"}});
        min_sigma = std::min(min_sigma, entropy_production(gen, random_density(4, rng)));
    }

    // Part two: steady II-law for the tricycle across a ten-point sweep.
    double worst_flow = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 10; ++i) {
        TricycleSpec spec;
        spec.omega_h = 3.0;
        spec.omega_c = 3.0 - (0.3 + 1.905 * i / 9.0);  // omega_w in [0.3, 2.205]
        spec.hot = BathSpec::harmonic_field(4.0, 3, 1.0, 1.0);
        spec.cold = BathSpec::harmonic_field(1.0, 3, 1.0, 1.0);
        spec.work = BathSpec::work_bath(0.5);
        const TricycleModel model = build_tricycle(spec);
        const ThermalGenerator gen = build_generator(model.hamiltonian, model.channels);
        const DensityOperator steady = steady_state(gen);
        const double flow = heat_current(gen, "hot", steady.matrix()) / 4.0 +
                            heat_current(gen, "cold", steady.matrix()) / 1.0;
        worst_flow = std::max(worst_flow, flow);
    }
    Outcome outcome;
    outcome.pass = (min_sigma >= -1e-9) && (worst_flow <= 1e-9);
    outcome.detail = "min sigma " + fmt(min_sigma) + " (>= -1e-9), max sum J/T " +
                     fmt(worst_flow) + " (<= 1e-9)";
    return outcome;
}

Outcome carnot_bound() {
    const double t_hot = 4.0, t_cold = 1.0;
    const double carnot = 1.0 - t_cold / t_hot;
    double worst_excess = -std::numeric_limits<double>::infinity();
    double best_efficiency = 0.0;
    for (int i = 0; i < 10; ++i) {
        TricycleSpec spec;
        spec.omega_h = 3.0;
        const double omega_w = 0.3 + (0.98 * carnot * 3.0 - 0.3) * i / 9.0;
        spec.omega_c = spec.omega_h - omega_w;
        spec.hot = BathSpec::harmonic_field(t_hot, 3, 1.0, 1.0);
        spec.cold = BathSpec::harmonic_field(t_cold, 3, 1.0, 1.0);
        spec.work = BathSpec::work_bath(0.5);
        const TricycleModel model = build_tricycle(spec);
        const ThermalGenerator gen = build_generator(model.hamiltonian, model.channels);
        const DensityOperator steady = steady_state(gen);
        const double j_h = heat_current(gen, "hot", steady.matrix());
        const double j_w = heat_current(gen, "work", steady.matrix());
        if (j_h <= 1e-12) continue;
        const double efficiency = -j_w / j_h;
        worst_excess = std::max(worst_excess, efficiency - carnot);
        best_efficiency = std::max(best_efficiency, efficiency);
    }
    Outcome outcome;
    const bool approached = best_efficiency >= carnot * 0.98 - 1e-9;
    outcome.pass = (worst_excess <= 1e-9) && approached;
    outcome.detail = "max (eff - Carnot) " + fmt(worst_excess) + " (<= 0), best efficiency " +
                     fmt(best_efficiency) + " vs Carnot " + fmt(carnot) + " (within 2%)";
    return outcome;
}

Outcome single_bath_driven_current() {
    const TlsModel tls = build_tls(1.0);
    const BathSpec bath = BathSpec::harmonic_field(1.0, 3, 1.0, 1.0);

    const PeriodicHamiltonian driven = build_driven_tls(1.0, 0.25, 0.8);
    const FloquetGenerator on = build_floquet_generator(driven, {{tls.coupling, bath, "b"}});
    const DensityOperator steady_on = steady_state(on.generator);
    const double into_bath_on = -floquet_current(on.generator, "b", steady_on.matrix());

    const PeriodicHamiltonian undriven = build_driven_tls(1.0, 0.0, 0.8);
    const FloquetGenerator off = build_floquet_generator(undriven, {{tls.coupling, bath, "b"}});
    const DensityOperator steady_off = steady_state(off.generator);
    const double into_bath_off = std::abs(floquet_current(off.generator, "b", steady_off.matrix()));

    Outcome outcome;
    outcome.pass = (into_bath_on > 1e-10) && (into_bath_off < 1e-10);
    outcome.detail = "driven J_bath " + fmt(into_bath_on) + " (> 1e-10), undriven |J| " +
                     fmt(into_bath_off) + " (< 1e-10)";
    return outcome;
}

Outcome otto_limit_cycle() {
    OttoSpec spec;
    spec.medium = "tls";
    spec.omega_cold = 1.0;
    spec.omega_hot = 2.0;
    spec.transverse = 0.3;
    spec.hot_bath = BathSpec::harmonic_field(2.0, 3, 1.0, 1.0);
    spec.cold_bath = BathSpec::harmonic_field(0.5, 3, 1.0, 1.0);
    spec.tau_hot = 6.0;
    spec.tau_cold = 6.0;
    spec.tau_hc = 1.5;
    spec.tau_ch = 1.5;
    const OttoCycle cycle = build_otto_cycle(spec);

    std::mt19937_64 rng(11);
    bool converged = true;
    bool monotone = true;
    DensityOperator fixed = DensityOperator::maximally_mixed(2);
    for (int i = 0; i < 10; ++i) {
        const LimitCycleResult result =
            iterate_to_limit_cycle(cycle.cycle, random_density(2, rng), 10000, 1e-11);
        fixed = result.fixed_point;
        const Matrix once = cycle.cycle.apply(result.fixed_point.matrix());
        if (trace_norm(once - result.fixed_point.matrix()) >= 1e-8) converged = false;
        for (size_t k = 1; k < result.conditional_entropies.size(); ++k) {
            if (result.conditional_entropies[k] >
                result.conditional_entropies[k - 1] + 1e-10) {
                monotone = false;
            }
        }
    }
    const CycleLedger ledger = cycle_ledger(cycle, fixed);
    const double scale =
        std::max({std::abs(ledger.q_hot), std::abs(ledger.q_cold), std::abs(ledger.work), 1.0});
    const double i_law = std::abs(ledger.q_hot + ledger.q_cold + ledger.work) / scale;
    const double ii_law = ledger.q_hot / 2.0 + ledger.q_cold / 0.5;

    Outcome outcome;
    outcome.pass = converged && monotone && (i_law < 1e-7) && (ii_law < 1e-7);
    outcome.detail = std::string(converged ? "converged from 10 states" : "no convergence") +
                     ", conditional entropy " + (monotone ? "monotone" : "NOT monotone") +
                     ", cycle I-law " + fmt(i_law) + " (< 1e-7), II-law " + fmt(ii_law) +
                     " (< 1e-7)";
    return outcome;
}

Outcome third_law_exponents() {
    const auto start = std::chrono::steady_clock::now();
    const BathSpec harmonic = BathSpec::harmonic_field(1.0, 3, 1.0, 1.0, 1e3);
    const auto sweep_h = cooling_sweep(harmonic, 1e-3, 1e-1, 40);
    const auto [alpha_h, eta_h] = bath_exponents(harmonic);
    const ExponentReport fit_h = fit_zeta(sweep_h, alpha_h, eta_h);

    const BathSpec bose = BathSpec::bose_gas(0.05, 0.01, 0.05, 1.0, 0.12);
    const auto sweep_b = cooling_sweep(bose, 1e-3, 1e-1, 40);
    const auto [alpha_b, eta_b] = bath_exponents(bose);
    const ExponentReport fit_b = fit_zeta(sweep_b, alpha_b, eta_b);

    const double elapsed = seconds_since(start);
    Outcome outcome;
    outcome.pass = fit_h.fit_valid && std::abs(fit_h.zeta - 1.0) <= 0.1 && fit_b.fit_valid &&
                   std::abs(fit_b.zeta - 1.5) <= 0.1 && elapsed < 30.0;
    outcome.detail = "harmonic zeta " + fmt(fit_h.zeta) + " (1.0 +- 0.1), Bose zeta " +
                     fmt(fit_b.zeta) + " (1.5 +- 0.1), runtime " + fmt(elapsed) + " s (< 30 s)";
    return outcome;
}

Outcome cooling_orderings() {
    const BathSpec harmonic = BathSpec::harmonic_field(1.0, 3, 1.0, 1.0, 1e3);
    const BathSpec bose = BathSpec::bose_gas(0.05, 0.01, 0.05, 1.0, 0.12);
    const auto sweep_h = cooling_sweep(harmonic, 1e-3, 1e-1, 30);
    const auto sweep_b = cooling_sweep(bose, 1e-3, 1e-1, 30);

    bool monotone = true;
    for (size_t i = 1; i < sweep_h.size(); ++i) {
        if (sweep_h[i].current <= sweep_h[i - 1].current) monotone = false;
        if (std::abs(sweep_h[i].dtdt) <= std::abs(sweep_h[i - 1].dtdt)) monotone = false;
        if (sweep_b[i].current <= sweep_b[i - 1].current) monotone = false;
        if (std::abs(sweep_b[i].dtdt) <= std::abs(sweep_b[i - 1].dtdt)) monotone = false;
    }
    bool ordering = true;
    for (size_t i = 0; i < sweep_h.size(); ++i) {
        if (sweep_h[i].temperature > 1e-2) continue;  // smallest decade only
        if (!(sweep_b[i].current > sweep_h[i].current)) ordering = false;
        if (!(std::abs(sweep_b[i].dtdt) < std::abs(sweep_h[i].dtdt))) ordering = false;
    }
    Outcome outcome;
    outcome.pass = monotone && ordering;
    outcome.detail = std::string("monotone vanishing ") + (monotone ? "yes" : "NO") +
                     "; lowest decade: Bose J > harmonic J and Bose |dT/dt| < harmonic |dT/dt| " +
                     (ordering ? "yes" : "NO");
    return outcome;
}

Outcome static_criteria() {
    const bool a = ground_state_criterion(1.0, 3);        // linear dispersion passes in d = 3
    const bool b = !ground_state_criterion(-1.0, 3);      // Ohmic excluded for d > 1
    const bool c = !ground_state_criterion(0.0, 2);       // Ohmic in d = 2 (kappa = 0) excluded
    const bool d = third_law_coupling_criterion(1.0) && !third_law_coupling_criterion(0.5);
    const double bound = thermoelectric_bound(3, 2.0);
    const bool e = std::abs(bound - M_PI * M_PI / 6.0 * 3.0 * 4.0) < 1e-12;
    Outcome outcome;
    outcome.pass = a && b && c && d && e;
    outcome.detail = "criteria " + std::string(a && b && c && d ? "reproduced" : "WRONG") +
                     ", bound(3, 2) = " + fmt(bound);
    return outcome;
}

Outcome floquet_reduction() {
    // Machinery gate with the commuting gap modulation: O(g^2) deviation.
    const double g = 1e-4;
    const PeriodicHamiltonian ph = build_tls_gap_modulation(1.0, g, 2.7);
    const HermitianOperator h0(Matrix(0.5 * pauli_z()));  // same basis as the drive
    const HermitianOperator coupling(pauli_x());
    const BathSpec bath = BathSpec::harmonic_field(1.0, 3, 1.0, 1.0);
    FloquetOptions opts;
    opts.q_max = 2;
    const FloquetGenerator fgen = build_floquet_generator(ph, {{coupling, bath, "b"}}, opts);
    const ThermalGenerator davies = build_generator(h0, {{coupling, bath, "b"}});
    const double defect = (fgen.generator.dissipator_superop() - davies.dissipator_superop())
                              .cwiseAbs()
                              .maxCoeff();

    // Quasi-energy splitting at resonance against the rotating-frame value.
    const double amp = 0.12;
    const FloquetBasis basis = compute_monodromy(build_driven_tls(1.0, amp, 1.0), 64, 1e-10);
    const double splitting_defect = std::abs(quasi_energy_splitting(basis) - 2.0 * amp);

    Outcome outcome;
    outcome.pass = (defect < 1e-6) && (splitting_defect < 1e-6);
    outcome.detail = "generator defect " + fmt(defect) + " (< 1e-6), splitting defect " +
                     fmt(splitting_defect) + " (< 1e-6)";
    return outcome;
}

Outcome consistency_check_thesis() {
    const char* corrupted = R"(
[model]
kind = "tls"
omega0 = 1.0
baths = ["hot", "cold"]

[[baths]]
id = "hot"
kind = "harmonic"
temperature = 2.0

[[baths]]
id = "cold"
kind = "harmonic"
temperature = 1.0
kms_scale = 3.0

[run]
mode = "steady"
)";
    const Scenario sc = parse_scenario(corrupted);
    RunFlags flags;
    flags.out_dir = "acceptance_out/non_kms";
    const RunReport report = run_scenario("steady", sc, flags);
    bool named = false;
    for (const auto& v : report.verdicts) {
        if (v.status == VerdictStatus::Fail && v.inequality.find("J_j/T_j") != std::string::npos) {
            named = true;
        }
    }
    Outcome outcome;
    outcome.pass = (report.exit_status == 3) && named;
    outcome.detail = "exit status " + std::to_string(report.exit_status) +
                     (named ? ", II-law violation named" : ", violation NOT named");
    return outcome;
}

}  // namespace

int main() {
    run(1, "Gibbs thermalization from 20 random states", gibbs_thermalization);
    run(2, "KMS detailed balance for harmonic and Bose baths", kms_detailed_balance);
    run(3, "I-law residual along the driven-TLS trajectory", first_law_driven);
    run(4, "Spohn inequality and steady second law", spohn_and_steady_second_law);
    run(5, "Carnot bound across the tricycle sweep", carnot_bound);
    run(6, "single-bath driven system dissipates strictly", single_bath_driven_current);
    run(7, "Otto limit cycle with monotone contraction", otto_limit_cycle);
    run(8, "third-law cooling exponents (harmonic 1.0, Bose 1.5)", third_law_exponents);
    run(9, "cooling current and rate orderings at low temperature", cooling_orderings);
    run(10, "static ground-state/coupling criteria and thermoelectric bound", static_criteria);
    run(11, "Floquet reduction to Davies and quasi-energy splitting", floquet_reduction);
    run(12, "non-KMS generator is rejected with exit code 3", consistency_check_thesis);
    if (g_failures == 0) {
        std::printf("all 12 acceptance criteria passed\n");
    } else {
        std::printf("%d acceptance criteria FAILED\n", g_failures);
    }
    return g_failures;
}
