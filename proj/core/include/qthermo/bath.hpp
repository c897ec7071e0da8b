// Bath spectral functions gamma(omega) with KMS completion, heat capacities,
// and the low-temperature criteria gating cooling to absolute zero.

#pragma once

#include <functional>

#include "qthermo/errors.hpp"

namespace qthermo {

enum class BathKind { HarmonicField, BoseGas, FermiGasScaling, WorkBath };

// Temperature plus spectral model. Exactly one of the parameter groups below
// is meaningful, selected by `kind`; the named constructors fill it in.
struct BathSpec {
    BathKind kind = BathKind::HarmonicField;
    double temperature = 1.0;  // energy units; +infinity for the work bath

    // HarmonicField: gamma(w) = coupling * w^(kappa+d-1) / (1 - exp(-w/T)) for w > 0,
    // KMS completion below zero, hard ultraviolet cutoff.
    int dimension = 3;
    double kappa = 1.0;
    double coupling = 1.0;  // lambda^2, absorbs the mode-density prefactor
    double cutoff = 50.0;
    // Detailed-balance corruption factor for consistency audits: the upward
    // rate is multiplied by kms_scale. 1.0 is the physical bath.
    double kms_scale = 1.0;

    // BoseGas (low-density s-wave scattering off a TLS impurity).
    double density = 0.01;
    double scattering_length = 0.05;
    double mass = 1.0;
    double critical_temperature = 0.12;

    // WorkBath: flat spectrum, infinite-temperature sentinel.
    double rate = 1.0;

    double heat_capacity_prefactor = 1.0;

    static BathSpec harmonic_field(double temperature, int dimension, double kappa,
                                   double coupling, double cutoff = 50.0);
    static BathSpec bose_gas(double temperature, double density, double scattering_length,
                             double mass, double critical_temperature);
    static BathSpec fermi_scaling(double temperature);
    static BathSpec work_bath(double rate);

    bool is_work() const { return kind == BathKind::WorkBath; }
    void validate() const;  // positivity constraints; throws DomainError

    // Spectral function including the KMS completion for omega < 0. At exactly
    // omega = 0 finite-temperature baths return 0 by convention and set
    // *flagged_zero (the pure-dephasing channel carries no heat).
    double gamma(double omega, bool* flagged_zero = nullptr) const;

    double heat_capacity(double t) const;  // throws Unsupported for the work bath
};

// Rate for the d-dimensional harmonic field, Bochner-positive for all omega.
double harmonic_gamma(const BathSpec& spec, double omega);

// Low-density Bose-gas rate at receiving frequency omega_c > 0. Below the
// critical temperature the density is replaced by the excited-state fraction.
double bose_gas_gamma(const BathSpec& spec, double omega_c);

double heat_capacity(const BathSpec& spec, double t);

// Evaluator form used by diagnostics.
struct SpectralFunction {
    std::function<double(double)> gamma;
    double temperature = 0.0;

    static SpectralFunction from_bath(const BathSpec& spec);
};

// Returns gamma(-omega)/gamma(omega); equals exp(-omega/T) for a KMS bath.
double kms_ratio_check(const SpectralFunction& sf, double omega);

// Modified Bessel function of the second kind, order one. Power series below
// x = 2, Chebyshev-corrected asymptotic form above; relative error < 1e-10
// over [1e-3, 50].
double bessel_k1(double x);
double bessel_k1_scaled(double x);  // exp(x) * K1(x), safe for large x

// True iff kappa > 2 - d: the interacting field has a normalizable ground state.
bool ground_state_criterion(double kappa, int dimension);

// True iff kappa >= 1: coupling compatible with unattainability of T = 0.
bool third_law_coupling_criterion(double kappa);

}  // namespace qthermo
