// Declarative scenario runner: TOML-subset config -> validated Scenario ->
// dispatched simulation with CSV artifacts and law-audit verdicts.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qthermo/bath.hpp"
#include "qthermo/models.hpp"
#include "qthermo/thermo.hpp"

namespace qthermo {

struct ScenarioBath {
    std::string id;
    BathSpec spec;
};

struct Scenario {
    std::string digest;  // FNV-1a of the source text

    // [model]
    std::string model_kind;  // tls | oscillator | tricycle | driven_tls | otto (may be empty
                             // for cool/check scenarios)
    double omega0 = 1.0;
    double osc_omega = 1.0;
    Index n_max = 8;
    double amplitude = 0.0;
    double drive_frequency = 1.0;
    std::vector<std::string> model_bath_ids;  // attached baths (tls/oscillator/driven_tls)
    std::string hot_id, cold_id, work_id;     // role bindings (tricycle/otto)
    double g_hot = 1.0, g_cold = 1.0, g_work = 1.0;
    double omega_h = 3.0, omega_c = 2.0;      // tricycle level spacings
    OttoSpec otto;  // bath specs resolved during validation

    // [[baths]]
    std::vector<ScenarioBath> baths;

    // [run]
    std::string mode = "simulate";
    double t_end = 20.0;
    double tol = 1e-8;
    int samples = 201;
    std::string initial = "maximally_mixed";
    double initial_temperature = 1.0;
    int q_max = 1;
    std::string sweep_parameter;
    std::vector<double> sweep_values;
    int max_cycles = 2000;
    double cycle_tol = 1e-9;
    double cool_t_low = 1e-3;
    double cool_t_high = 1e-1;
    int cool_points = 25;
    std::string cool_bath_id;

    // [check]
    bool has_check = false;
    double check_kappa = 1.0;
    int check_dimension = 3;
    int check_channels = 1;
    double check_t_cold = 1.0;

    // [output]
    std::string out_dir = ".";
    int precision = 17;
    bool gnuplot = false;

    const BathSpec& bath(const std::string& id) const;
};

// Parses and fully validates a scenario. All schema violations are collected
// and reported together in one SchemaError.
Scenario parse_scenario(const std::string& text);

struct RunFlags {
    std::string out_dir;  // overrides [output] directory when non-empty
    double tol = -1.0;
    double tmax = -1.0;
    int q_max = -1;
    uint64_t seed = 0;
    bool gnuplot = false;
};

struct RunReport {
    std::string digest;
    std::vector<LawVerdict> verdicts;
    std::vector<std::pair<std::string, double>> stats;
    std::vector<std::string> artifacts;  // files written
    std::vector<std::string> lines;      // human-readable summary
    int exit_status = 0;                 // 0 ok, 3 physics violation
};

// Dispatches the scenario. The subcommand must match [run] mode. Exit-code
// contract: schema problems throw SchemaError (1), numerical failures throw
// the corresponding Error (2), detected physics violations return a report
// with exit_status 3.
RunReport run_scenario(const std::string& subcommand, const Scenario& scenario,
                       const RunFlags& flags = {});

// Worker count for sweep dispatch: QTHERMO_THREADS when set, else a small
// hardware default. Output order never depends on the schedule.
int worker_count();

}  // namespace qthermo
