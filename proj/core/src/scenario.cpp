#include "qthermo/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "qthermo/third_law.hpp"
#include "qthermo/toml.hpp"

namespace qthermo {

namespace {

std::string fnv1a_digest(const std::string& text) {
    uint64_t hash = 1469598103934665603ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::string format_double(double v, int precision) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open output file " + path);
    out << content;
}

// --------------------------------------------------------------------------
// parallel sweep dispatch

template <typename Fn>
void parallel_for(size_t n, Fn&& fn) {
    const int workers = std::min<int>(worker_count(), static_cast<int>(n));
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> team;
    team.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        team.emplace_back([&] {
            while (!failed.load()) {
                const size_t i = next.fetch_add(1);
                if (i >= n) break;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    failed.store(true);
                }
            }
        });
    }
    for (auto& t : team) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// --------------------------------------------------------------------------
// schema extraction helpers

class FieldReader {
public:
    FieldReader(const toml::Value& table, std::string prefix, std::vector<std::string>& errors)
        : table_(table), prefix_(std::move(prefix)), errors_(errors) {}

    bool has(const std::string& key) const { return table_.contains(key); }

    double number(const std::string& key, double fallback, bool required = false) const {
        const toml::Value* v = table_.find(key);
        if (v == nullptr) {
            if (required) errors_.push_back(prefix_ + key + ": required field missing");
            return fallback;
        }
        try {
            return v->as_double();
        } catch (const SchemaError&) {
            errors_.push_back(prefix_ + key + ": expected a number");
            return fallback;
        }
    }

    int64_t integer(const std::string& key, int64_t fallback, bool required = false) const {
        const toml::Value* v = table_.find(key);
        if (v == nullptr) {
            if (required) errors_.push_back(prefix_ + key + ": required field missing");
            return fallback;
        }
        try {
            return v->as_integer();
        } catch (const SchemaError&) {
            errors_.push_back(prefix_ + key + ": expected an integer");
            return fallback;
        }
    }

    std::string text(const std::string& key, std::string fallback, bool required = false) const {
        const toml::Value* v = table_.find(key);
        if (v == nullptr) {
            if (required) errors_.push_back(prefix_ + key + ": required field missing");
            return fallback;
        }
        try {
            return v->as_string();
        } catch (const SchemaError&) {
            errors_.push_back(prefix_ + key + ": expected a string");
            return fallback;
        }
    }

    bool boolean(const std::string& key, bool fallback) const {
        const toml::Value* v = table_.find(key);
        if (v == nullptr) return fallback;
        try {
            return v->as_boolean();
        } catch (const SchemaError&) {
            errors_.push_back(prefix_ + key + ": expected a boolean");
            return fallback;
        }
    }

private:
    const toml::Value& table_;
    std::string prefix_;
    std::vector<std::string>& errors_;
};

BathSpec read_bath(const toml::Value& table, const std::string& prefix,
                   std::vector<std::string>& errors) {
    FieldReader field(table, prefix, errors);
    BathSpec spec;
    const std::string kind = field.text("kind", "harmonic", true);
    if (kind == "harmonic") {
        spec.kind = BathKind::HarmonicField;
        spec.temperature = field.number("temperature", 1.0, true);
        spec.dimension = static_cast<int>(field.integer("dimension", 3));
        spec.kappa = field.number("kappa", 1.0);
        spec.coupling = field.number("coupling", 1.0);
        spec.cutoff = field.number("cutoff", 50.0);
        spec.kms_scale = field.number("kms_scale", 1.0);
    } else if (kind == "bose_gas") {
        spec.kind = BathKind::BoseGas;
        spec.temperature = field.number("temperature", 1.0, true);
        spec.density = field.number("density", 0.01);
        spec.scattering_length = field.number("scattering_length", 0.05);
        spec.mass = field.number("mass", 1.0);
        spec.critical_temperature = field.number("critical_temperature", 0.12);
    } else if (kind == "fermi") {
        spec.kind = BathKind::FermiGasScaling;
        spec.temperature = field.number("temperature", 1.0, true);
    } else if (kind == "work") {
        spec.kind = BathKind::WorkBath;
        spec.temperature = std::numeric_limits<double>::infinity();
        spec.rate = field.number("rate", 1.0);
    } else {
        errors.push_back(prefix + "kind: unknown bath kind '" + kind + "'");
        return spec;
    }
    spec.heat_capacity_prefactor = field.number("c0", 1.0);
    try {
        spec.validate();
    } catch (const DomainError& e) {
        errors.push_back(prefix + std::string(e.what()).substr(0));
    }
    return spec;
}

}  // namespace

int worker_count() {
    if (const char* env = std::getenv("QTHERMO_THREADS")) {
        const int parsed = std::atoi(env);
        if (parsed >= 1) return parsed;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::clamp(hw, 1u, 8u));
}

const BathSpec& Scenario::bath(const std::string& id) const {
    for (const auto& entry : baths) {
        if (entry.id == id) return entry.spec;
    }
    throw SchemaError("scenario: bath id '" + id + "' is not declared");
}

Scenario parse_scenario(const std::string& text) {
    const toml::Value root = toml::parse(text);
    std::vector<std::string> errors;
    Scenario sc;
    sc.digest = fnv1a_digest(text);

    // ---- baths ----
    std::set<std::string> bath_ids;
    if (const toml::Value* baths = root.find("baths")) {
        if (baths->kind != toml::Value::Kind::Array) {
            errors.push_back("baths: expected [[baths]] entries");
        } else {
            for (size_t i = 0; i < baths->array.size(); ++i) {
                const std::string prefix = "baths[" + std::to_string(i) + "].";
                const toml::Value& entry = baths->array[i];
                FieldReader field(entry, prefix, errors);
                ScenarioBath bath;
                bath.id = field.text("id", "", true);
                if (!bath.id.empty() && !bath_ids.insert(bath.id).second) {
                    errors.push_back(prefix + "id: duplicate bath id '" + bath.id + "'");
                }
                bath.spec = read_bath(entry, prefix, errors);
                sc.baths.push_back(std::move(bath));
            }
        }
    }
    auto require_bath = [&](const std::string& id, const std::string& where) {
        if (id.empty()) return;
        if (bath_ids.count(id) == 0) {
            errors.push_back(where + ": bath id '" + id + "' is not declared");
        }
    };

    // ---- run ----
    static const std::set<std::string> kModes = {"simulate", "steady", "otto", "cool", "check"};
    if (const toml::Value* run = root.find("run")) {
        FieldReader field(*run, "run.", errors);
        sc.mode = field.text("mode", "simulate", true);
        if (kModes.count(sc.mode) == 0) {
            errors.push_back("run.mode: unknown mode '" + sc.mode + "'");
        }
        sc.t_end = field.number("t_end", sc.t_end);
        sc.tol = field.number("tol", sc.tol);
        sc.samples = static_cast<int>(field.integer("samples", sc.samples));
        sc.initial = field.text("initial", sc.initial);
        sc.initial_temperature = field.number("initial_temperature", sc.initial_temperature);
        sc.q_max = static_cast<int>(field.integer("q_max", sc.q_max));
        sc.sweep_parameter = field.text("sweep_parameter", "");
        if (const toml::Value* values = run->find("sweep_values")) {
            if (values->kind != toml::Value::Kind::Array) {
                errors.push_back("run.sweep_values: expected an array of numbers");
            } else {
                for (const auto& v : values->array) {
                    try {
                        sc.sweep_values.push_back(v.as_double());
                    } catch (const SchemaError&) {
                        errors.push_back("run.sweep_values: expected numbers");
                        break;
                    }
                }
            }
        }
        sc.max_cycles = static_cast<int>(field.integer("max_cycles", sc.max_cycles));
        sc.cycle_tol = field.number("cycle_tol", sc.cycle_tol);
        sc.cool_t_low = field.number("t_low", sc.cool_t_low);
        sc.cool_t_high = field.number("t_high", sc.cool_t_high);
        sc.cool_points = static_cast<int>(field.integer("points", sc.cool_points));
        sc.cool_bath_id = field.text("bath", "");
        if (sc.tol < 1e-12 || sc.tol > 1e-4) {
            errors.push_back("run.tol: must lie in [1e-12, 1e-4]");
        }
        if (sc.t_end <= 0.0) errors.push_back("run.t_end: must be > 0");
        if (sc.samples < 2) errors.push_back("run.samples: must be >= 2");
        static const std::set<std::string> kInitials = {"gibbs", "ground", "excited",
                                                        "maximally_mixed", "random"};
        if (kInitials.count(sc.initial) == 0) {
            errors.push_back("run.initial: unknown initial state '" + sc.initial + "'");
        }
    } else {
        errors.push_back("run: section missing");
    }

    // ---- model ----
    const bool model_required = (sc.mode == "simulate" || sc.mode == "steady" || sc.mode == "otto");
    if (const toml::Value* model = root.find("model")) {
        FieldReader field(*model, "model.", errors);
        sc.model_kind = field.text("kind", "", true);
        static const std::set<std::string> kKinds = {"tls", "oscillator", "tricycle",
                                                     "driven_tls", "otto"};
        if (!sc.model_kind.empty() && kKinds.count(sc.model_kind) == 0) {
            errors.push_back("model.kind: unknown model '" + sc.model_kind + "'");
        }
        auto read_attached_baths = [&]() {
            if (const toml::Value* list = model->find("baths")) {
                if (list->kind == toml::Value::Kind::Array) {
                    for (const auto& v : list->array) {
                        try {
                            sc.model_bath_ids.push_back(v.as_string());
                        } catch (const SchemaError&) {
                            errors.push_back("model.baths: expected bath id strings");
                        }
                    }
                } else {
                    errors.push_back("model.baths: expected an array of bath ids");
                }
            } else {
                const std::string single = field.text("bath", "", true);
                if (!single.empty()) sc.model_bath_ids.push_back(single);
            }
            for (const auto& id : sc.model_bath_ids) require_bath(id, "model.baths");
        };

        if (sc.model_kind == "tls") {
            sc.omega0 = field.number("omega0", 1.0, true);
            if (sc.omega0 <= 0.0) errors.push_back("model.omega0: must be > 0");
            read_attached_baths();
        } else if (sc.model_kind == "oscillator") {
            sc.osc_omega = field.number("omega", 1.0, true);
            sc.n_max = field.integer("n_max", 8);
            if (sc.osc_omega <= 0.0) errors.push_back("model.omega: must be > 0");
            if (sc.n_max < 4) errors.push_back("model.n_max: must be >= 4");
            read_attached_baths();
        } else if (sc.model_kind == "driven_tls") {
            sc.omega0 = field.number("omega0", 1.0, true);
            sc.amplitude = field.number("amplitude", 0.0, true);
            sc.drive_frequency = field.number("drive_frequency", 1.0, true);
            if (sc.omega0 <= 0.0) errors.push_back("model.omega0: must be > 0");
            if (sc.amplitude < 0.0) errors.push_back("model.amplitude: must be >= 0");
            if (sc.drive_frequency <= 0.0) errors.push_back("model.drive_frequency: must be > 0");
            read_attached_baths();
        } else if (sc.model_kind == "tricycle") {
            sc.omega_h = field.number("omega_h", 3.0, true);
            sc.omega_c = field.number("omega_c", 2.0, true);
            sc.hot_id = field.text("hot_bath", "", true);
            sc.cold_id = field.text("cold_bath", "", true);
            sc.work_id = field.text("work_bath", "", true);
            sc.g_hot = field.number("g_h", 1.0);
            sc.g_cold = field.number("g_c", 1.0);
            sc.g_work = field.number("g_w", 1.0);
            require_bath(sc.hot_id, "model.hot_bath");
            require_bath(sc.cold_id, "model.cold_bath");
            require_bath(sc.work_id, "model.work_bath");
            if (sc.omega_h <= sc.omega_c || sc.omega_c <= 0.0) {
                errors.push_back("model: tricycle needs omega_h > omega_c > 0");
            }
        } else if (sc.model_kind == "otto") {
            sc.otto.medium = field.text("medium", "tls");
            sc.otto.omega_cold = field.number("omega_cold", 1.0, true);
            sc.otto.omega_hot = field.number("omega_hot", 2.0, true);
            sc.otto.transverse = field.number("transverse", 0.0);
            sc.otto.tau_hot = field.number("tau_hot", 5.0);
            sc.otto.tau_cold = field.number("tau_cold", 5.0);
            sc.otto.tau_hc = field.number("tau_hc", 2.0);
            sc.otto.tau_ch = field.number("tau_ch", 2.0);
            sc.otto.schedule = field.text("schedule", "linear");
            sc.otto.n_max = field.integer("n_max", 12);
            sc.hot_id = field.text("hot_bath", "", true);
            sc.cold_id = field.text("cold_bath", "", true);
            require_bath(sc.hot_id, "model.hot_bath");
            require_bath(sc.cold_id, "model.cold_bath");
        }
    } else if (model_required) {
        errors.push_back("model: section required for mode '" + sc.mode + "'");
    }

    // ---- check ----
    if (const toml::Value* check = root.find("check")) {
        sc.has_check = true;
        FieldReader field(*check, "check.", errors);
        sc.check_kappa = field.number("kappa", 1.0, true);
        sc.check_dimension = static_cast<int>(field.integer("dimension", 3, true));
        sc.check_channels = static_cast<int>(field.integer("channels", 1));
        sc.check_t_cold = field.number("t_cold", 1.0);
        if (sc.check_dimension < 1) errors.push_back("check.dimension: must be >= 1");
        if (sc.check_channels < 1) errors.push_back("check.channels: must be >= 1");
        if (sc.check_t_cold <= 0.0) errors.push_back("check.t_cold: must be > 0");
    } else if (sc.mode == "check") {
        errors.push_back("check: section required for mode 'check'");
    }

    // ---- output ----
    if (const toml::Value* output = root.find("output")) {
        FieldReader field(*output, "output.", errors);
        sc.out_dir = field.text("directory", ".");
        sc.precision = static_cast<int>(field.integer("precision", 17));
        sc.gnuplot = field.boolean("gnuplot", false);
        if (sc.precision < 6 || sc.precision > 17) {
            errors.push_back("output.precision: must lie in [6, 17]");
        }
    }

    // ---- cross checks ----
    if (sc.mode == "cool") {
        if (sc.baths.empty()) {
            errors.push_back("cool: at least one bath must be declared");
        } else if (!sc.cool_bath_id.empty()) {
            require_bath(sc.cool_bath_id, "run.bath");
        }
        if (sc.cool_t_low <= 0.0 || sc.cool_t_high <= sc.cool_t_low) {
            errors.push_back("cool: needs 0 < t_low < t_high");
        }
        if (sc.cool_points < 20) errors.push_back("cool: points must be >= 20");
    }
    if (model_required && sc.model_kind.empty() && root.find("model") != nullptr) {
        // reported above through the required-field machinery
    }

    if (!errors.empty()) {
        std::string joined = "scenario validation failed:";
        for (const auto& e : errors) joined += "\n  - " + e;
        throw SchemaError(joined);
    }
    return sc;
}

// ----------------------------------------------------------------------------
// dispatch helpers

namespace {

struct CsvWriter {
    std::ostringstream out;
    int precision;

    explicit CsvWriter(int precision_) : precision(precision_) {}

    void comment(const std::string& text) { out << "# " << text << "\n"; }
    void header(const std::vector<std::string>& columns) {
        for (size_t i = 0; i < columns.size(); ++i) {
            out << (i ? "," : "") << columns[i];
        }
        out << "\n";
    }
    void row(const std::vector<double>& values) {
        for (size_t i = 0; i < values.size(); ++i) {
            out << (i ? "," : "") << format_double(values[i], precision);
        }
        out << "\n";
    }
};

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

struct StaticModel {
    HermitianOperator hamiltonian;
    std::vector<CouplingChannel> channels;
    std::vector<Index> guard_levels;
};

StaticModel assemble_static_model(const Scenario& sc) {
    if (sc.model_kind == "tls") {
        TlsModel tls = build_tls(sc.omega0);
        std::vector<CouplingChannel> channels;
        for (const auto& id : sc.model_bath_ids) {
            channels.push_back({tls.coupling, sc.bath(id), id});
        }
        return {tls.hamiltonian, std::move(channels), {}};
    }
    if (sc.model_kind == "oscillator") {
        OscillatorModel osc = build_oscillator(sc.osc_omega, sc.n_max);
        std::vector<CouplingChannel> channels;
        for (const auto& id : sc.model_bath_ids) {
            channels.push_back({osc.coupling, sc.bath(id), id});
        }
        return {osc.hamiltonian, std::move(channels), osc.guard_levels()};
    }
    if (sc.model_kind == "tricycle") {
        TricycleSpec spec;
        spec.omega_h = sc.omega_h;
        spec.omega_c = sc.omega_c;
        spec.hot = sc.bath(sc.hot_id);
        spec.cold = sc.bath(sc.cold_id);
        spec.work = sc.bath(sc.work_id);
        spec.g_h = sc.g_hot;
        spec.g_c = sc.g_cold;
        spec.g_w = sc.g_work;
        TricycleModel model = build_tricycle(spec);
        // channels carry the role names; rebind to the declared bath ids
        model.channels[0].bath_id = sc.hot_id;
        model.channels[1].bath_id = sc.cold_id;
        if (model.channels.size() > 2) model.channels[2].bath_id = sc.work_id;
        return {model.hamiltonian, std::move(model.channels), {}};
    }
    throw SchemaError("scenario: model '" + sc.model_kind + "' is not a static model");
}

DensityOperator initial_state(const Scenario& sc, const HermitianOperator& h, uint64_t seed) {
    if (sc.initial == "maximally_mixed") return DensityOperator::maximally_mixed(h.dim());
    if (sc.initial == "gibbs") return gibbs_state(h, sc.initial_temperature);
    if (sc.initial == "random") {
        std::mt19937_64 rng(seed == 0 ? 0x9e3779b97f4a7c15ULL : seed);
        return random_density(h.dim(), rng);
    }
    const SpectralDecomposition dec = eigendecompose(h);
    const Matrix& proj = (sc.initial == "ground") ? dec.projectors.front() : dec.projectors.back();
    Matrix rho = proj / proj.trace().real();
    return DensityOperator(std::move(rho));
}

void append_verdict(RunReport& report, LawVerdict verdict) {
    if (verdict.status == VerdictStatus::Fail) report.exit_status = 3;
    report.verdicts.push_back(std::move(verdict));
}

std::string verdict_line(const LawVerdict& v) {
    const char* status = v.status == VerdictStatus::Pass
                             ? "PASS"
                             : (v.status == VerdictStatus::Fail ? "FAIL" : "NOT-APPLICABLE");
    std::string line = v.name + ": " + status;
    if (v.status != VerdictStatus::NotApplicable) {
        line += " (" + v.inequality + "; measured " + format_double(v.measured, 6) + ")";
    }
    return line;
}

// 4th-order central differences on a uniform grid; one-sided edges excluded.
std::vector<double> interior_derivative(const std::vector<double>& t,
                                        const std::vector<double>& f) {
    std::vector<double> d(t.size(), std::numeric_limits<double>::quiet_NaN());
    if (t.size() < 5) return d;
    const double h = t[1] - t[0];
    for (size_t i = 2; i + 2 < t.size(); ++i) {
        d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
    }
    return d;
}

LawVerdict first_law_verdict(const ThermoLedger& ledger) {
    std::vector<double> energy, times;
    for (const auto& row : ledger.rows) {
        times.push_back(row.t);
        energy.push_back(row.energy);
    }
    const std::vector<double> dedt = interior_derivative(times, energy);
    double worst = 0.0;
    for (size_t i = 2; i + 2 < ledger.rows.size(); ++i) {
        const LedgerRow& row = ledger.rows[i];
        double total_current = 0.0;
        double current_scale = 0.0;
        for (double j : row.currents) {
            total_current += j;
            current_scale = std::max(current_scale, std::abs(j));
        }
        const double scale = std::max({std::abs(row.power), current_scale, 1.0});
        worst = std::max(worst, std::abs(dedt[i] - row.power - total_current) / scale);
    }
    LawVerdict verdict;
    verdict.name = "I-law (trajectory)";
    verdict.inequality = "|dE/dt - P - sum_j J_j| <= 1e-6 * scale";
    verdict.measured = worst;
    verdict.status = (worst <= 1e-6) ? VerdictStatus::Pass : VerdictStatus::Fail;
    return verdict;
}

LawVerdict spohn_verdict(const ThermoLedger& ledger) {
    double min_sigma = std::numeric_limits<double>::infinity();
    for (const auto& row : ledger.rows) min_sigma = std::min(min_sigma, row.sigma);
    LawVerdict verdict;
    verdict.name = "II-law (Spohn)";
    verdict.inequality = "sigma >= -1e-9";
    verdict.measured = min_sigma;
    verdict.status = (min_sigma >= -1e-9) ? VerdictStatus::Pass : VerdictStatus::Fail;
    return verdict;
}

std::string ledger_csv(const ThermoLedger& ledger, int precision) {
    CsvWriter csv(precision);
    csv.comment("units: natural (hbar = k_B = 1); t [1/E], E [E], S [dimensionless], J and P [E^2], sigma [E]");
    std::vector<std::string> columns = {"t", "E", "S_vn", "S_E"};
    for (const auto& id : ledger.bath_ids) columns.push_back("J_" + id);
    columns.push_back("P");
    columns.push_back("sigma");
    csv.header(columns);
    for (const auto& row : ledger.rows) {
        std::vector<double> values = {row.t, row.energy, row.entropy_vn, row.entropy_energy};
        values.insert(values.end(), row.currents.begin(), row.currents.end());
        values.push_back(row.power);
        values.push_back(row.sigma);
        csv.row(values);
    }
    return csv.out.str();
}

std::string trajectory_gnuplot(const std::string& csv_name, size_t bath_count) {
    std::ostringstream gp;
    gp << "set datafile separator ','\n";
    gp << "set key autotitle columnhead\n";
    gp << "set xlabel 't'\n";
    gp << "plot '" << csv_name << "' using 1:2 with lines";
    gp << ", '' using 1:3 with lines";
    gp << ", '' using 1:4 with lines";
    for (size_t j = 0; j < bath_count; ++j) {
        gp << ", '' using 1:" << (5 + j) << " with lines";
    }
    gp << "\n";
    return gp.str();
}

// ---- mode runners ----

RunReport run_simulate(const Scenario& sc, const RunFlags& flags, const std::string& out_dir) {
    RunReport report;
    report.digest = sc.digest;
    const double t_end = (flags.tmax > 0.0) ? flags.tmax : sc.t_end;
    const double tol = (flags.tol > 0.0) ? flags.tol : sc.tol;
    // The finite-difference I-law audit needs a dense uniform grid; the CSV
    // keeps the user's sampling.
    const int audit_samples = std::max(sc.samples, 801);

    ThermoLedger ledger;
    ThermoLedger audit_ledger;
    StepRecord steps;
    if (sc.model_kind == "driven_tls") {
        PeriodicHamiltonian ph = build_driven_tls(sc.omega0, sc.amplitude, sc.drive_frequency);
        const TlsModel tls = build_tls(sc.omega0);
        std::vector<CouplingChannel> channels;
        for (const auto& id : sc.model_bath_ids) {
            channels.push_back({tls.coupling, sc.bath(id), id});
        }
        FloquetOptions opts;
        if (flags.q_max > 0) opts.q_max = flags.q_max;
        else if (sc.q_max > 0) opts.q_max = sc.q_max;
        FloquetGenerator fgen = build_floquet_generator(ph, channels, opts);

        const Matrix dissipator = fgen.generator.dissipator_superop();
        PropagatorCache cache(ph, fgen.basis.substeps);
        auto rhs = [&](double t) {
            const Matrix u = cache.at(t);
            return Matrix(superop_commutator(ph.at(t)) +
                          rotate_dissipator_superop(dissipator, u));
        };
        PropagateOptions popts;
        popts.tol = tol;
        popts.samples = sc.samples;
        const DensityOperator rho0 =
            initial_state(sc, HermitianOperator::symmetrized(ph.at(0.0)), flags.seed);
        const Trajectory traj = propagate(rhs, rho0, t_end, popts);
        steps = traj.steps;
        ledger = build_ledger_driven(fgen, ph, traj);
        if (sc.samples >= audit_samples) {
            audit_ledger = ledger;
        } else {
            popts.samples = audit_samples;
            audit_ledger = build_ledger_driven(fgen, ph, propagate(rhs, rho0, t_end, popts));
        }
    } else {
        const StaticModel model = assemble_static_model(sc);
        const ThermalGenerator gen = build_generator(model.hamiltonian, model.channels);
        PropagateOptions popts;
        popts.tol = tol;
        popts.samples = sc.samples;
        popts.guard_levels = model.guard_levels;
        const DensityOperator rho0 = initial_state(sc, model.hamiltonian, flags.seed);
        const Trajectory traj = propagate(gen, rho0, t_end, popts);
        steps = traj.steps;
        ledger = build_ledger(gen, traj);
        if (sc.samples >= audit_samples) {
            audit_ledger = ledger;
        } else {
            popts.samples = audit_samples;
            audit_ledger = build_ledger(gen, propagate(gen, rho0, t_end, popts));
        }
    }

    const std::string csv_path = join_path(out_dir, "trajectory.csv");
    write_text_file(csv_path, ledger_csv(ledger, sc.precision));
    report.artifacts.push_back(csv_path);
    if (sc.gnuplot || flags.gnuplot) {
        const std::string gp_path = join_path(out_dir, "trajectory.gp");
        write_text_file(gp_path, trajectory_gnuplot("trajectory.csv", ledger.bath_ids.size()));
        report.artifacts.push_back(gp_path);
    }

    append_verdict(report, first_law_verdict(audit_ledger));
    append_verdict(report, spohn_verdict(ledger));
    report.stats.emplace_back("max_trace_drift", steps.max_trace_drift);
    report.stats.emplace_back("min_eigenvalue", steps.min_eigenvalue);
    report.stats.emplace_back("steps_accepted", static_cast<double>(steps.accepted));
    report.stats.emplace_back("final_energy", ledger.rows.back().energy);
    report.stats.emplace_back("final_entropy_vn", ledger.rows.back().entropy_vn);
    report.stats.emplace_back("work_total", ledger.work);
    return report;
}

RunReport run_steady(const Scenario& sc, const RunFlags& flags, const std::string& out_dir) {
    RunReport report;
    report.digest = sc.digest;

    if (sc.model_kind == "driven_tls") {
        PeriodicHamiltonian ph = build_driven_tls(sc.omega0, sc.amplitude, sc.drive_frequency);
        const TlsModel tls = build_tls(sc.omega0);
        std::vector<CouplingChannel> channels;
        for (const auto& id : sc.model_bath_ids) {
            channels.push_back({tls.coupling, sc.bath(id), id});
        }
        FloquetOptions opts;
        if (flags.q_max > 0) opts.q_max = flags.q_max;
        else if (sc.q_max > 0) opts.q_max = sc.q_max;
        const FloquetGenerator fgen = build_floquet_generator(ph, channels, opts);
        const DensityOperator steady = steady_state(fgen.generator);
        const auto currents = floquet_currents(fgen.generator, steady.matrix());

        std::map<std::string, double> temperatures;
        for (const auto& id : fgen.generator.bath_ids()) {
            temperatures[id] = fgen.generator.bath_temperature(id);
        }
        const SteadyAudit audit = second_law_check(currents, temperatures);
        append_verdict(report, audit.second_law);

        double power = 0.0;
        CsvWriter csv(sc.precision);
        csv.comment("steady-state currents, natural units");
        csv.header({"bath", "J"});
        for (const auto& [id, current] : currents) {
            csv.out << id << "," << format_double(current, sc.precision) << "\n";
            power -= current;
            report.stats.emplace_back("J_" + id, current);
        }
        const std::string csv_path = join_path(out_dir, "steady.csv");
        write_text_file(csv_path, csv.out.str());
        report.artifacts.push_back(csv_path);
        report.stats.emplace_back("power_avg", power);
        report.stats.emplace_back("entropy_flow", audit.entropy_flow);
        return report;
    }

    // Static models (tls wire / tricycle), optionally swept.
    struct Point {
        double param = 0.0;
        std::vector<std::pair<std::string, double>> currents;
        SteadyAudit audit;
    };
    std::vector<double> params = sc.sweep_values;
    if (params.empty()) params.push_back(0.0);
    std::vector<Point> points(params.size());

    parallel_for(params.size(), [&](size_t i) {
        Scenario local = sc;
        if (!sc.sweep_parameter.empty() && !sc.sweep_values.empty()) {
            if (sc.sweep_parameter == "omega_w") {
                local.omega_c = local.omega_h - params[i];
            } else if (sc.sweep_parameter == "t_cold") {
                for (auto& bath : local.baths) {
                    if (bath.id == sc.cold_id) bath.spec.temperature = params[i];
                }
            } else {
                throw SchemaError("steady: unsupported sweep parameter '" + sc.sweep_parameter +
                                  "'");
            }
        }
        const StaticModel model = assemble_static_model(local);
        const ThermalGenerator gen = build_generator(model.hamiltonian, model.channels);
        const DensityOperator steady = steady_state(gen);
        Point point;
        point.param = params[i];
        for (const auto& id : gen.bath_ids()) {
            point.currents.emplace_back(id, heat_current(gen, id, steady.matrix()));
        }
        std::map<std::string, double> temperatures;
        for (const auto& id : gen.bath_ids()) temperatures[id] = gen.bath_temperature(id);
        point.audit = second_law_check(point.currents, temperatures, local.hot_id, local.cold_id,
                                       local.work_id);
        points[i] = std::move(point);
    });

    CsvWriter csv(sc.precision);
    csv.comment("steady-state currents per sweep point, natural units");
    std::vector<std::string> columns;
    columns.push_back(sc.sweep_parameter.empty() ? "point" : sc.sweep_parameter);
    for (const auto& [id, unused] : points.front().currents) {
        (void)unused;
        columns.push_back("J_" + id);
    }
    columns.push_back("entropy_flow");
    columns.push_back("efficiency");
    columns.push_back("carnot_limit");
    csv.header(columns);
    double worst_flow = -std::numeric_limits<double>::infinity();
    double worst_carnot = -std::numeric_limits<double>::infinity();
    bool any_engine = false;
    for (size_t i = 0; i < points.size(); ++i) {
        const Point& p = points[i];
        std::vector<double> values = {sc.sweep_parameter.empty() ? static_cast<double>(i)
                                                                 : p.param};
        for (const auto& [id, current] : p.currents) {
            (void)id;
            values.push_back(current);
        }
        values.push_back(p.audit.entropy_flow);
        values.push_back(p.audit.engine ? p.audit.efficiency
                                        : std::numeric_limits<double>::quiet_NaN());
        values.push_back(p.audit.carnot_limit);
        csv.row(values);
        worst_flow = std::max(worst_flow, p.audit.entropy_flow);
        if (p.audit.engine) {
            any_engine = true;
            worst_carnot = std::max(worst_carnot, p.audit.efficiency - p.audit.carnot_limit);
        }
    }
    const std::string csv_path = join_path(out_dir, "steady.csv");
    write_text_file(csv_path, csv.out.str());
    report.artifacts.push_back(csv_path);

    LawVerdict second_law;
    second_law.name = "II-law (steady)";
    second_law.inequality = "sum_j J_j/T_j <= 0";
    second_law.measured = worst_flow;
    second_law.status = (worst_flow <= 1e-9) ? VerdictStatus::Pass : VerdictStatus::Fail;
    append_verdict(report, second_law);

    LawVerdict carnot;
    carnot.name = "Carnot bound";
    carnot.inequality = "(-J_w)/J_h <= 1 - T_c/T_h";
    if (any_engine) {
        carnot.measured = worst_carnot;
        carnot.status = (worst_carnot <= 1e-9) ? VerdictStatus::Pass : VerdictStatus::Fail;
    }
    append_verdict(report, carnot);

    report.stats.emplace_back("points", static_cast<double>(points.size()));
    report.stats.emplace_back("entropy_flow_max", worst_flow);
    for (const auto& [id, current] : points.front().currents) {
        report.stats.emplace_back("J_" + id, current);
    }
    if (points.front().audit.engine) {
        report.stats.emplace_back("efficiency", points.front().audit.efficiency);
        report.stats.emplace_back("carnot_limit", points.front().audit.carnot_limit);
    }
    return report;
}

RunReport run_otto(const Scenario& sc, const RunFlags& flags, const std::string& out_dir) {
    RunReport report;
    report.digest = sc.digest;

    OttoSpec spec = sc.otto;
    spec.hot_bath = sc.bath(sc.hot_id);
    spec.cold_bath = sc.bath(sc.cold_id);
    const OttoCycle cycle = build_otto_cycle(spec);

    const HermitianOperator h_hot(cycle.h_hot);
    const DensityOperator rho0 = initial_state(sc, h_hot, flags.seed);
    const LimitCycleResult limit =
        iterate_to_limit_cycle(cycle.cycle, rho0, sc.max_cycles, sc.cycle_tol);

    // Replay the approach, logging the per-cycle ledger.
    CsvWriter csv(sc.precision);
    csv.comment("per-cycle ledger, natural units");
    csv.header({"cycle", "Q_h", "Q_c", "W", "efficiency", "trace_distance_to_fixed_point"});
    DensityOperator state = rho0;
    const int rows = std::min(limit.iterations + 1, 10000);
    for (int n = 0; n < rows; ++n) {
        DensityOperator next = state;
        const CycleLedger ledger = cycle_ledger(cycle, state, &next);
        csv.row({static_cast<double>(n), ledger.q_hot, ledger.q_cold, ledger.work,
                 ledger.efficiency, trace_distance(next, limit.fixed_point)});
        state = next;
    }
    const std::string csv_path = join_path(out_dir, "cycles.csv");
    write_text_file(csv_path, csv.out.str());
    report.artifacts.push_back(csv_path);

    // Audits at the limit cycle.
    const CycleLedger at_limit = cycle_ledger(cycle, limit.fixed_point, nullptr);
    const double scale =
        std::max({std::abs(at_limit.q_hot), std::abs(at_limit.q_cold), std::abs(at_limit.work), 1.0});
    LawVerdict first_law;
    first_law.name = "I-law (cycle-averaged)";
    first_law.inequality = "|Q_h + Q_c + W| <= 1e-7 * scale";
    first_law.measured = std::abs(at_limit.q_hot + at_limit.q_cold + at_limit.work) / scale;
    first_law.status = (first_law.measured <= 1e-7) ? VerdictStatus::Pass : VerdictStatus::Fail;
    append_verdict(report, first_law);

    LawVerdict second_law;
    second_law.name = "II-law (cycle-averaged)";
    second_law.inequality = "Q_h/T_h + Q_c/T_c <= 1e-7";
    second_law.measured = at_limit.q_hot / spec.hot_bath.temperature +
                          at_limit.q_cold / spec.cold_bath.temperature;
    second_law.status = (second_law.measured <= 1e-7) ? VerdictStatus::Pass : VerdictStatus::Fail;
    append_verdict(report, second_law);

    report.stats.emplace_back("cycles_to_converge", static_cast<double>(limit.iterations));
    report.stats.emplace_back("Q_h", at_limit.q_hot);
    report.stats.emplace_back("Q_c", at_limit.q_cold);
    report.stats.emplace_back("W", at_limit.work);
    report.stats.emplace_back("efficiency", at_limit.efficiency);
    return report;
}

RunReport run_cool(const Scenario& sc, const RunFlags&, const std::string& out_dir) {
    RunReport report;
    report.digest = sc.digest;

    const BathSpec& bath =
        sc.cool_bath_id.empty() ? sc.baths.front().spec : sc.bath(sc.cool_bath_id);

    std::vector<CoolingPoint> sweep(static_cast<size_t>(sc.cool_points));
    const double log_lo = std::log(sc.cool_t_low);
    const double log_hi = std::log(sc.cool_t_high);
    parallel_for(sweep.size(), [&](size_t i) {
        const double t = std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(i) /
                                               (sc.cool_points - 1));
        CoolingPoint p;
        p.temperature = t;
        p.omega_opt = optimal_receiving_frequency(bath, t);
        p.current = cooling_current(bath, t, p.omega_opt);
        BathSpec at_t = bath;
        at_t.temperature = t;
        p.dtdt = -p.current / heat_capacity(at_t, t);
        sweep[i] = p;
    });

    CsvWriter csv(sc.precision);
    csv.comment("optimized cooling sweep, natural units");
    csv.header({"T_c", "omega_opt", "J_c", "dT_dt"});
    for (const auto& p : sweep) {
        csv.row({p.temperature, p.omega_opt, p.current, p.dtdt});
    }
    const std::string csv_path = join_path(out_dir, "cooling.csv");
    write_text_file(csv_path, csv.out.str());
    report.artifacts.push_back(csv_path);

    const auto [alpha, eta] = bath_exponents(bath);
    const ExponentReport fit = fit_zeta(sweep, alpha, eta);

    LawVerdict fit_verdict;
    fit_verdict.name = "III-law exponent fit";
    fit_verdict.inequality = "log-log fit R^2 >= 0.999";
    fit_verdict.measured = fit.r_squared;
    fit_verdict.status = fit.fit_valid ? VerdictStatus::Pass : VerdictStatus::Fail;
    append_verdict(report, fit_verdict);

    LawVerdict unatt_verdict;
    unatt_verdict.name = "III-law (unattainability)";
    unatt_verdict.inequality = "zeta >= 1";
    unatt_verdict.measured = fit.zeta;
    unatt_verdict.status = fit.compliant ? VerdictStatus::Pass : VerdictStatus::Fail;
    append_verdict(report, unatt_verdict);

    report.stats.emplace_back("zeta", fit.zeta);
    report.stats.emplace_back("zeta_half_width", fit.half_width);
    report.stats.emplace_back("zeta_predicted", fit.zeta_predicted);
    report.stats.emplace_back("r_squared", fit.r_squared);
    report.stats.emplace_back("alpha", alpha);
    report.stats.emplace_back("eta", eta);
    return report;
}

RunReport run_check(const Scenario& sc, const RunFlags&, const std::string& out_dir) {
    RunReport report;
    report.digest = sc.digest;

    const bool ground = ground_state_criterion(sc.check_kappa, sc.check_dimension);
    LawVerdict ground_verdict;
    ground_verdict.name = "ground-state criterion";
    ground_verdict.inequality = "kappa > 2 - d";
    ground_verdict.measured = sc.check_kappa - (2.0 - sc.check_dimension);
    ground_verdict.status = ground ? VerdictStatus::Pass : VerdictStatus::Fail;
    append_verdict(report, ground_verdict);

    const bool coupling = third_law_coupling_criterion(sc.check_kappa);
    LawVerdict coupling_verdict;
    coupling_verdict.name = "III-law coupling criterion";
    coupling_verdict.inequality = "kappa >= 1";
    coupling_verdict.measured = sc.check_kappa;
    coupling_verdict.status = coupling ? VerdictStatus::Pass : VerdictStatus::Fail;
    append_verdict(report, coupling_verdict);

    const double bound = thermoelectric_bound(sc.check_channels, sc.check_t_cold);
    report.stats.emplace_back("thermoelectric_bound", bound);

    CsvWriter csv(sc.precision);
    csv.comment("static criteria");
    csv.header({"criterion", "value"});
    csv.out << "ground_state," << (ground ? 1 : 0) << "\n";
    csv.out << "third_law_coupling," << (coupling ? 1 : 0) << "\n";
    csv.out << "thermoelectric_bound," << format_double(bound, sc.precision) << "\n";
    const std::string csv_path = join_path(out_dir, "check.csv");
    write_text_file(csv_path, csv.out.str());
    report.artifacts.push_back(csv_path);
    return report;
}

}  // namespace

RunReport run_scenario(const std::string& subcommand, const Scenario& sc, const RunFlags& flags) {
    if (subcommand != sc.mode) {
        throw SchemaError("run_scenario: subcommand '" + subcommand + "' does not match [run] mode '" +
                          sc.mode + "'");
    }
    const std::string out_dir = flags.out_dir.empty() ? sc.out_dir : flags.out_dir;
    std::filesystem::create_directories(out_dir);

    RunReport report;
    if (sc.mode == "simulate") {
        report = run_simulate(sc, flags, out_dir);
    } else if (sc.mode == "steady") {
        report = run_steady(sc, flags, out_dir);
    } else if (sc.mode == "otto") {
        report = run_otto(sc, flags, out_dir);
    } else if (sc.mode == "cool") {
        report = run_cool(sc, flags, out_dir);
    } else if (sc.mode == "check") {
        report = run_check(sc, flags, out_dir);
    } else {
        throw SchemaError("run_scenario: unknown mode '" + sc.mode + "'");
    }

    report.lines.push_back("scenario digest: " + report.digest);
    for (const auto& v : report.verdicts) report.lines.push_back(verdict_line(v));
    for (const auto& [key, value] : report.stats) {
        report.lines.push_back(key + " = " + format_double(value, 10));
    }
    for (const auto& artifact : report.artifacts) {
        report.lines.push_back("wrote " + artifact);
    }
    return report;
}

}  // namespace qthermo
