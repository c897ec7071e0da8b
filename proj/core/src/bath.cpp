#include "qthermo/bath.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace qthermo {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Clenshaw evaluation of a Chebyshev series on [-1, 1] (SLATEC dcsevl).
double chebyshev_eval(double x, const double* cs, int n) {
    double b0 = 0.0, b1 = 0.0, b2 = 0.0;
    const double twox = 2.0 * x;
    for (int i = n - 1; i >= 0; --i) {
        b2 = b1;
        b1 = b0;
        b0 = twox * b1 - b2 + cs[i];
    }
    return 0.5 * (b0 - b2);
}

// I1 by its power series; converges to full precision for x <= 2.
double bessel_i1_series(double x) {
    const double q = 0.25 * x * x;
    double term = 0.5 * x;  // k = 0 term of (x/2) sum q^k / (k! (k+1)!)
    double sum = term;
    for (int k = 1; k < 40; ++k) {
        term *= q / (static_cast<double>(k) * static_cast<double>(k + 1));
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return sum;
}

// K1 power series for x <= 2:
//   K1(x) = ln(x/2) I1(x) + 1/x - (x/4) sum_k [psi(k+1)+psi(k+2)] q^k / (k!(k+1)!)
double bessel_k1_small(double x) {
    constexpr double euler_gamma = 0.57721566490153286061;
    const double q = 0.25 * x * x;
    double psi_k1 = -euler_gamma;        // psi(1)
    double psi_k2 = 1.0 - euler_gamma;   // psi(2)
    double factor = 1.0;                 // q^k / (k! (k+1)!)
    double sum = psi_k1 + psi_k2;
    for (int k = 1; k < 40; ++k) {
        factor *= q / (static_cast<double>(k) * static_cast<double>(k + 1));
        psi_k1 += 1.0 / static_cast<double>(k);
        psi_k2 += 1.0 / static_cast<double>(k + 1);
        const double term = factor * (psi_k1 + psi_k2);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return std::log(0.5 * x) * bessel_i1_series(x) + 1.0 / x - 0.25 * x * sum;
}

// Chebyshev fits for the scaled tail exp(x) K1(x) sqrt(x) - 1.25 (SLATEC ak1/ak12).
const double kAk1[18] = {
    0.27443134069738829695257666227266,
    0.07571989953199367817089237814929,
    -0.0014410515564754061229853116175625,
    6.6501169551257479394251385477036e-5,
    -4.3699847095201407660580845089167e-6,
    3.5402774997630526799417139008534e-7,
    -3.3111637792932920208982688245704e-8,
    3.4459775819010534532311499770992e-9,
    -3.8989323474754271048981937492758e-10,
    4.7208197504658356400947449339005e-11,
    -6.047835662875356234537359156289e-12,
    8.1284948748658747888193837985663e-13,
    -1.1386945747147891428923915951042e-13,
    1.654035840846228232597294820509e-14,
    -2.4809025677068848221516010440533e-15,
    3.8292378907024096948429227299157e-16,
    -6.0647341040012418187768210377386e-17,
    9.8324256232648616038194004650666e-18};
const double kAk12[14] = {
    0.06379308343739001036600488534102,
    0.02832887813049720935835030284708,
    -2.475370673905250345414545566732e-4,
    5.771972451607248820470976625763e-6,
    -2.068939219536548302745533196552e-7,
    9.739983441381804180309213097887e-9,
    -5.585336140380624984688895511129e-10,
    3.732996634046185240221212854731e-11,
    -2.825051961023225445135065754928e-12,
    2.372019002484144173643496955486e-13,
    -2.176677387991753979268301667938e-14,
    2.157914161616032453939562689706e-15,
    -2.290196930718269275991551338154e-16,
    2.582885729823274961919939565226e-17};

}  // namespace

double bessel_k1(double x) {
    if (!(x > 0.0)) throw DomainError("bessel_k1: argument must be positive");
    if (x <= 2.0) return bessel_k1_small(x);
    return std::exp(-x) * bessel_k1_scaled(x);
}

double bessel_k1_scaled(double x) {
    if (!(x > 0.0)) throw DomainError("bessel_k1_scaled: argument must be positive");
    if (x <= 2.0) return std::exp(x) * bessel_k1_small(x);
    if (x <= 8.0) return (chebyshev_eval((16.0 / x - 5.0) / 3.0, kAk1, 18) + 1.25) / std::sqrt(x);
    return (chebyshev_eval(16.0 / x - 1.0, kAk12, 14) + 1.25) / std::sqrt(x);
}

BathSpec BathSpec::harmonic_field(double temperature, int dimension, double kappa,
                                  double coupling, double cutoff) {
    BathSpec spec;
    spec.kind = BathKind::HarmonicField;
    spec.temperature = temperature;
    spec.dimension = dimension;
    spec.kappa = kappa;
    spec.coupling = coupling;
    spec.cutoff = cutoff;
    spec.validate();
    return spec;
}

BathSpec BathSpec::bose_gas(double temperature, double density, double scattering_length,
                            double mass, double critical_temperature) {
    BathSpec spec;
    spec.kind = BathKind::BoseGas;
    spec.temperature = temperature;
    spec.density = density;
    spec.scattering_length = scattering_length;
    spec.mass = mass;
    spec.critical_temperature = critical_temperature;
    spec.validate();
    return spec;
}

BathSpec BathSpec::fermi_scaling(double temperature) {
    BathSpec spec;
    spec.kind = BathKind::FermiGasScaling;
    spec.temperature = temperature;
    spec.validate();
    return spec;
}

BathSpec BathSpec::work_bath(double rate) {
    BathSpec spec;
    spec.kind = BathKind::WorkBath;
    spec.temperature = std::numeric_limits<double>::infinity();
    spec.rate = rate;
    spec.validate();
    return spec;
}

void BathSpec::validate() const {
    switch (kind) {
        case BathKind::HarmonicField:
            if (temperature < 0.0) throw DomainError("bath: temperature must be >= 0");
            if (dimension < 1 || dimension > 3) throw DomainError("bath: dimension must be 1, 2 or 3");
            if (kappa < 0.0) throw DomainError("bath: coupling exponent kappa must be >= 0");
            if (coupling <= 0.0) throw DomainError("bath: coupling prefactor must be > 0");
            if (cutoff <= 0.0) throw DomainError("bath: ultraviolet cutoff must be > 0");
            if (kms_scale <= 0.0) throw DomainError("bath: kms_scale must be > 0");
            break;
        case BathKind::BoseGas:
            if (temperature <= 0.0) throw DomainError("bath: Bose gas temperature must be > 0");
            if (density <= 0.0) throw DomainError("bath: density must be > 0");
            if (scattering_length <= 0.0) throw DomainError("bath: scattering length must be > 0");
            if (mass <= 0.0) throw DomainError("bath: particle mass must be > 0");
            if (critical_temperature <= 0.0) throw DomainError("bath: critical temperature must be > 0");
            break;
        case BathKind::FermiGasScaling:
            if (temperature <= 0.0) throw DomainError("bath: Fermi temperature must be > 0");
            break;
        case BathKind::WorkBath:
            if (rate <= 0.0) throw DomainError("bath: work-bath rate must be > 0");
            break;
    }
}

double harmonic_gamma(const BathSpec& spec, double omega) {
    if (spec.kind != BathKind::HarmonicField) {
        throw Unsupported("harmonic_gamma: bath is not a harmonic field");
    }
    if (std::abs(omega) > spec.cutoff) {
        throw FrequencyOutOfRange("harmonic_gamma: |omega| = " + std::to_string(std::abs(omega)) +
                                  " beyond ultraviolet cutoff " + std::to_string(spec.cutoff));
    }
    if (omega == 0.0) return 0.0;  // zero-frequency convention, flagged by BathSpec::gamma

    const double power = spec.kappa + static_cast<double>(spec.dimension) - 1.0;
    if (omega > 0.0) {
        const double bare = spec.coupling * std::pow(omega, power);
        if (spec.temperature == 0.0) return bare;
        return bare / (-std::expm1(-omega / spec.temperature));
    }
    if (spec.temperature == 0.0) return 0.0;  // no absorption from a T = 0 bath
    return spec.kms_scale * std::exp(omega / spec.temperature) * harmonic_gamma(spec, -omega);
}

double bose_gas_gamma(const BathSpec& spec, double omega_c) {
    if (spec.kind != BathKind::BoseGas) {
        throw Unsupported("bose_gas_gamma: bath is not a Bose gas");
    }
    if (!(omega_c > 0.0)) throw DomainError("bose_gas_gamma: omega_c must be > 0");
    if (!(spec.temperature > 0.0)) throw DomainError("bose_gas_gamma: temperature must be > 0");

    const double t = spec.temperature;
    double n_eff = spec.density;
    if (t < spec.critical_temperature) {
        n_eff *= std::pow(t / spec.critical_temperature, 1.5);
    }
    const double prefactor = std::pow(4.0 * kPi, 4) / std::sqrt(2.0 * kPi * spec.mass * t);
    const double z = 0.5 * omega_c / t;
    return prefactor * spec.scattering_length * spec.scattering_length * n_eff * omega_c *
           bessel_k1_scaled(z);
}

double BathSpec::gamma(double omega, bool* flagged_zero) const {
    if (flagged_zero != nullptr) *flagged_zero = false;
    switch (kind) {
        case BathKind::HarmonicField:
            if (omega == 0.0) {
                if (flagged_zero != nullptr) *flagged_zero = true;
                return 0.0;
            }
            return harmonic_gamma(*this, omega);
        case BathKind::BoseGas:
            if (omega == 0.0) {
                if (flagged_zero != nullptr) *flagged_zero = true;
                return 0.0;
            }
            if (omega > 0.0) return bose_gas_gamma(*this, omega);
            return std::exp(omega / temperature) * bose_gas_gamma(*this, -omega);
        case BathKind::FermiGasScaling:
            throw Unsupported("gamma: the Fermi gas bath carries scaling laws only");
        case BathKind::WorkBath:
            return rate;  // flat spectrum at every frequency, including zero
    }
    throw Unsupported("gamma: unknown bath kind");
}

double heat_capacity(const BathSpec& spec, double t) {
    if (!(t > 0.0)) throw DomainError("heat_capacity: temperature must be > 0");
    const double c0 = spec.heat_capacity_prefactor;
    switch (spec.kind) {
        case BathKind::HarmonicField:
            return c0 * std::pow(t, static_cast<double>(spec.dimension));
        case BathKind::BoseGas:
            if (t < spec.critical_temperature) return c0 * std::pow(t, 1.5);
            return c0 * std::pow(spec.critical_temperature, 1.5);
        case BathKind::FermiGasScaling:
            return c0 * t;
        case BathKind::WorkBath:
            throw Unsupported("heat_capacity: undefined for the work bath");
    }
    throw Unsupported("heat_capacity: unknown bath kind");
}

double BathSpec::heat_capacity(double t) const { return qthermo::heat_capacity(*this, t); }

SpectralFunction SpectralFunction::from_bath(const BathSpec& spec) {
    SpectralFunction sf;
    sf.temperature = spec.temperature;
    sf.gamma = [spec](double omega) { return spec.gamma(omega); };
    return sf;
}

double kms_ratio_check(const SpectralFunction& sf, double omega) {
    return sf.gamma(-omega) / sf.gamma(omega);
}

bool ground_state_criterion(double kappa, int dimension) {
    return kappa > 2.0 - static_cast<double>(dimension);
}

bool third_law_coupling_criterion(double kappa) { return kappa >= 1.0; }

}  // namespace qthermo
