// qthermo: scenario-driven simulations of thermal quantum devices with
// built-in law audits.
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure,
// 3 physics violation detected by an audit.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "qthermo/scenario.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw qthermo::SchemaError("cannot read scenario file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

struct CommonArgs {
    std::string scenario_path;
    qthermo::RunFlags flags;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("scenario", args.scenario_path, "scenario file (TOML)")->required();
    cmd->add_option("--out", args.flags.out_dir, "output directory (overrides [output])");
    cmd->add_option("--tol", args.flags.tol, "integrator tolerance override");
    cmd->add_option("--tmax", args.flags.tmax, "simulation horizon override");
    cmd->add_option("--qmax", args.flags.q_max, "Floquet harmonic truncation override");
    cmd->add_option("--seed", args.flags.seed, "seed for random initial states");
    cmd->add_flag("--gnuplot", args.flags.gnuplot, "emit a gnuplot script next to the CSV");
}

int dispatch(const std::string& mode, const CommonArgs& args) {
    const std::string text = read_file(args.scenario_path);
    const qthermo::Scenario scenario = qthermo::parse_scenario(text);
    const qthermo::RunReport report = qthermo::run_scenario(mode, scenario, args.flags);
    for (const auto& line : report.lines) std::cout << line << "\n";
    return report.exit_status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"thermal quantum device simulator with law audits"};
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> modes = {
        {"simulate", "propagate a master equation and emit the trajectory ledger"},
        {"steady", "steady-state currents and the second-law audit"},
        {"otto", "iterate a four-stroke cycle to its limit cycle"},
        {"cool", "optimized cooling sweep and the third-law exponent fit"},
        {"check", "static coupling/ground-state criteria and the thermoelectric bound"},
    };

    std::map<std::string, CommonArgs> args;
    for (const auto& [name, description] : modes) {
        add_common(app.add_subcommand(name, description), args[name]);
    }

    CLI11_PARSE(app, argc, argv);

    const std::string mode = app.get_subcommands().front()->get_name();
    try {
        return dispatch(mode, args[mode]);
    } catch (const qthermo::SchemaError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 1;
    } catch (const qthermo::Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
