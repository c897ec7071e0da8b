#include "qthermo/models.hpp"

#include <cmath>

namespace qthermo {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

}  // namespace

Matrix pauli_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Matrix pauli_y() {
    Matrix m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return m;
}

Matrix pauli_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

TlsModel build_tls(double omega0) {
    if (!(omega0 > 0.0)) throw DomainError("build_tls: omega0 must be > 0");
    Matrix h = Matrix::Zero(2, 2);
    h(1, 1) = omega0;
    return TlsModel{HermitianOperator(std::move(h)), HermitianOperator(pauli_x()), omega0};
}

OscillatorModel build_oscillator(double omega, Index n_max) {
    if (!(omega > 0.0)) throw DomainError("build_oscillator: omega must be > 0");
    if (n_max < 4) throw DomainError("build_oscillator: n_max must be >= 4");
    Matrix h = Matrix::Zero(n_max, n_max);
    Matrix x = Matrix::Zero(n_max, n_max);
    for (Index k = 0; k < n_max; ++k) {
        h(k, k) = omega * static_cast<double>(k);
        if (k + 1 < n_max) {
            const double amp = std::sqrt(static_cast<double>(k + 1));
            x(k, k + 1) = amp;  // a
            x(k + 1, k) = amp;  // a^+
        }
    }
    return OscillatorModel{HermitianOperator(std::move(h)), HermitianOperator(std::move(x)),
                           omega, n_max};
}

std::vector<Index> OscillatorModel::guard_levels() const {
    return {n_max - 2, n_max - 1};
}

void TricycleSpec::validate() const {
    if (!(omega_h > 0.0) || !(omega_c > 0.0) || !(omega_w() > 0.0)) {
        throw FrequencyMismatch("tricycle: needs omega_h > omega_c > 0");
    }
    if (std::abs((omega_c + omega_w()) - omega_h) > 1e-12 * omega_h) {
        throw FrequencyMismatch("tricycle: omega_w must equal omega_h - omega_c");
    }
    if (!(hot.temperature > cold.temperature && cold.temperature > 0.0)) {
        throw DomainError("tricycle: requires T_h > T_c > 0");
    }
    if (!(g_h > 0.0 && g_c > 0.0 && g_w >= 0.0)) {
        throw DomainError("tricycle: coupling amplitudes must be positive (g_w may be 0)");
    }
}

TricycleModel build_tricycle(const TricycleSpec& spec) {
    spec.validate();
    Matrix h = Matrix::Zero(3, 3);
    h(1, 1) = spec.omega_c;
    h(2, 2) = spec.omega_h;

    auto bond = [](Index a, Index b, double g) {
        Matrix s = Matrix::Zero(3, 3);
        s(a, b) = g;
        s(b, a) = g;
        return s;
    };

    std::vector<CouplingChannel> channels;
    channels.push_back({HermitianOperator(bond(0, 2, spec.g_h)), spec.hot, "hot"});
    channels.push_back({HermitianOperator(bond(0, 1, spec.g_c)), spec.cold, "cold"});
    if (spec.g_w > 0.0) {
        channels.push_back({HermitianOperator(bond(1, 2, spec.g_w)), spec.work, "work"});
    }
    return TricycleModel{HermitianOperator(std::move(h)), std::move(channels), spec};
}

PeriodicHamiltonian build_driven_tls(double omega0, double g, double drive_frequency) {
    if (!(drive_frequency > 0.0)) throw DomainError("build_driven_tls: drive frequency must be > 0");
    if (g < 0.0) throw DomainError("build_driven_tls: amplitude must be >= 0");
    PeriodicHamiltonian ph;
    ph.period = kTwoPi / drive_frequency;
    ph.hamiltonian = [omega0, g, drive_frequency](double t) {
        return Matrix(0.5 * omega0 * pauli_z() + g * (std::cos(drive_frequency * t) * pauli_x() +
                                                      std::sin(drive_frequency * t) * pauli_y()));
    };
    ph.derivative = [g, drive_frequency](double t) {
        return Matrix(g * drive_frequency *
                      (-std::sin(drive_frequency * t) * pauli_x() +
                       std::cos(drive_frequency * t) * pauli_y()));
    };
    return ph;
}

PeriodicHamiltonian build_tls_gap_modulation(double omega0, double g, double drive_frequency) {
    if (!(drive_frequency > 0.0)) {
        throw DomainError("build_tls_gap_modulation: drive frequency must be > 0");
    }
    PeriodicHamiltonian ph;
    ph.period = kTwoPi / drive_frequency;
    ph.hamiltonian = [omega0, g, drive_frequency](double t) {
        return Matrix((0.5 * omega0 + g * std::cos(drive_frequency * t)) * pauli_z());
    };
    ph.derivative = [g, drive_frequency](double t) {
        return Matrix(-g * drive_frequency * std::sin(drive_frequency * t) * pauli_z());
    };
    return ph;
}

void OttoSpec::validate() const {
    if (medium != "tls" && medium != "oscillator") {
        throw DomainError("otto: medium must be 'tls' or 'oscillator'");
    }
    if (!(omega_cold > 0.0) || !(omega_hot > omega_cold)) {
        throw DomainError("otto: needs omega_hot > omega_cold > 0");
    }
    if (tau_hot <= 0.0 || tau_cold <= 0.0 || tau_hc < 0.0 || tau_ch < 0.0) {
        throw DomainError("otto: isochore durations must be > 0, ramps >= 0");
    }
    if (transverse < 0.0) throw DomainError("otto: transverse field must be >= 0");
    if (schedule != "linear" && schedule != "smooth") {
        throw DomainError("otto: schedule must be 'linear' or 'smooth'");
    }
    if (medium == "oscillator" && n_max < 4) throw DomainError("otto: n_max must be >= 4");
}

namespace {

double schedule_shape(const std::string& schedule, double s) {
    if (schedule == "smooth") return 0.5 * (1.0 - std::cos(s * 3.14159265358979323846));
    return s;
}

Matrix otto_hamiltonian(const OttoSpec& spec, double omega) {
    if (spec.medium == "tls") {
        Matrix h = Matrix::Zero(2, 2);
        h(1, 1) = omega;
        if (spec.transverse != 0.0) h += 0.5 * spec.transverse * pauli_x();
        return h;
    }
    // Oscillator in quadrature form H = p^2/2 + omega^2 x^2 / 2, built on the
    // unit-frequency ladder so frequency changes do not commute.
    const Index n = spec.n_max;
    Matrix x = Matrix::Zero(n, n);
    Matrix p = Matrix::Zero(n, n);
    for (Index k = 0; k + 1 < n; ++k) {
        const double amp = std::sqrt(0.5 * static_cast<double>(k + 1));
        x(k, k + 1) = amp;
        x(k + 1, k) = amp;
        p(k, k + 1) = Complex(0.0, amp);
        p(k + 1, k) = Complex(0.0, -amp);
    }
    return (0.5 * (p * p) + 0.5 * omega * omega * (x * x)).eval();
}

Matrix otto_coupling(const OttoSpec& spec) {
    if (spec.medium == "tls") return pauli_x();
    const Index n = spec.n_max;
    Matrix x = Matrix::Zero(n, n);
    for (Index k = 0; k + 1 < n; ++k) {
        const double amp = std::sqrt(static_cast<double>(k + 1));
        x(k, k + 1) = amp;
        x(k + 1, k) = amp;
    }
    return x;
}

}  // namespace

std::function<Matrix(double)> OttoCycle::ramp_hc() const {
    const OttoSpec s = spec;
    const double duration = std::max(s.tau_hc, 1e-300);
    return [s, duration](double t) {
        const double x = schedule_shape(s.schedule, std::clamp(t / duration, 0.0, 1.0));
        return otto_hamiltonian(s, s.omega_hot + (s.omega_cold - s.omega_hot) * x);
    };
}

std::function<Matrix(double)> OttoCycle::ramp_ch() const {
    const OttoSpec s = spec;
    const double duration = std::max(s.tau_ch, 1e-300);
    return [s, duration](double t) {
        const double x = schedule_shape(s.schedule, std::clamp(t / duration, 0.0, 1.0));
        return otto_hamiltonian(s, s.omega_cold + (s.omega_hot - s.omega_cold) * x);
    };
}

OttoCycle build_otto_cycle(const OttoSpec& spec) {
    spec.validate();
    OttoCycle cycle;
    cycle.spec = spec;
    cycle.h_hot = otto_hamiltonian(spec, spec.omega_hot);
    cycle.h_cold = otto_hamiltonian(spec, spec.omega_cold);
    const HermitianOperator coupling(otto_coupling(spec));

    const ThermalGenerator gen_hot = build_generator(
        HermitianOperator(cycle.h_hot), {{coupling, spec.hot_bath, "hot"}});
    const ThermalGenerator gen_cold = build_generator(
        HermitianOperator(cycle.h_cold), {{coupling, spec.cold_bath, "cold"}});

    cycle.segments.push_back(thermal_segment(gen_hot, spec.tau_hot));
    cycle.segments.push_back(unitary_ramp(cycle.ramp_hc(), spec.tau_hc));
    cycle.segments.push_back(thermal_segment(gen_cold, spec.tau_cold));
    cycle.segments.push_back(unitary_ramp(cycle.ramp_ch(), spec.tau_ch));

    CPMap composed = cycle.segments[0];
    for (size_t i = 1; i < cycle.segments.size(); ++i) {
        composed = compose(cycle.segments[i], composed);
    }
    composed.provenance = "composition";
    cycle.cycle = std::move(composed);
    return cycle;
}

CycleLedger cycle_ledger(const OttoCycle& cycle, const DensityOperator& start,
                         DensityOperator* end) {
    const Matrix& h_hot = cycle.h_hot;
    const Matrix& h_cold = cycle.h_cold;

    Matrix rho = start.matrix();
    const double e0 = real_trace_product(rho, h_hot);
    rho = cycle.segments[0].apply(rho);
    const double e1 = real_trace_product(rho, h_hot);
    rho = cycle.segments[1].apply(rho);
    const double e2 = real_trace_product(rho, h_cold);
    rho = cycle.segments[2].apply(rho);
    const double e3 = real_trace_product(rho, h_cold);
    rho = cycle.segments[3].apply(rho);
    const double e4 = real_trace_product(rho, h_hot);

    CycleLedger ledger;
    ledger.q_hot = e1 - e0;
    ledger.q_cold = e3 - e2;
    ledger.work = (e2 - e1) + (e4 - e3);
    if (ledger.q_hot > 0.0 && ledger.work < 0.0) {
        ledger.efficiency = -ledger.work / ledger.q_hot;  // engine
    } else if (ledger.work > 0.0 && ledger.q_cold > 0.0) {
        ledger.efficiency = ledger.q_cold / ledger.work;  // refrigerator COP
    }
    if (end != nullptr) {
        rho = 0.5 * (rho + rho.adjoint().eval());
        rho /= rho.trace().real();
        *end = DensityOperator(std::move(rho), 1e-11, 1e-9, -1e-7);
    }
    return ledger;
}

}  // namespace qthermo
