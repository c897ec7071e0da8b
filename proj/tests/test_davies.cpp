#include "doctest.h"

#include <cmath>
#include <random>

#include "qthermo/davies.hpp"
#include "qthermo/models.hpp"

using namespace qthermo;

namespace {

ThermalGenerator tls_generator(double omega0, const BathSpec& bath) {
    const TlsModel tls = build_tls(omega0);
    return build_generator(tls.hamiltonian, {{tls.coupling, bath, "bath"}});
}

}  // namespace

TEST_CASE("bohr jump operators of a TLS") {
    const TlsModel tls = build_tls(1.0);
    const auto jumps = bohr_jump_operators(tls.coupling, eigendecompose(tls.hamiltonian));
    REQUIRE(jumps.size() == 1);  // no omega = 0 component for sigma_x
    CHECK(jumps[0].first == doctest::Approx(1.0));
    Matrix lowering = Matrix::Zero(2, 2);
    lowering(0, 1) = 1.0;
    CHECK((jumps[0].second - lowering).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("coupling commuting with H yields a single zero-frequency term") {
    Matrix h = Matrix::Zero(2, 2);
    h(1, 1) = 1.0;
    const auto jumps =
        bohr_jump_operators(HermitianOperator(pauli_z()), eigendecompose(HermitianOperator(h)));
    REQUIRE(jumps.size() == 1);
    CHECK(jumps[0].first == 0.0);
    CHECK((jumps[0].second - pauli_z()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("eigenoperator property and completeness on a random 5-level system") {
    std::mt19937_64 rng(41);
    const Matrix h = random_hermitian(5, rng);
    const Matrix s = random_hermitian(5, rng);
    const HermitianOperator hop(h);
    const HermitianOperator sop(s);
    const SpectralDecomposition dec = eigendecompose(hop);
    const auto jumps = bohr_jump_operators(sop, dec);

    Matrix total = Matrix::Zero(5, 5);
    for (const auto& [omega, op] : jumps) {
        const Matrix commutator = h * op - op * h;
        CHECK((commutator + omega * op).cwiseAbs().maxCoeff() < 1e-9);
        total += op;
        if (omega > 0.0) total += op.adjoint();
    }
    CHECK((total - s).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("generator rates follow detailed balance") {
    const ThermalGenerator gen = tls_generator(1.0, BathSpec::harmonic_field(1.0, 3, 1.0, 1.0));
    REQUIRE(gen.terms.size() == 1);
    CHECK(gen.terms[0].gamma_up / gen.terms[0].gamma_down ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-12));

    const ThermalGenerator frozen = tls_generator(1.0, BathSpec::harmonic_field(0.0, 3, 1.0, 1.0));
    CHECK(frozen.terms[0].gamma_up == 0.0);
}

TEST_CASE("three-level system with three channels builds one pair per transition") {
    TricycleSpec spec;
    spec.omega_h = 3.0;
    spec.omega_c = 2.0;
    spec.hot = BathSpec::harmonic_field(4.0, 3, 1.0, 1.0);
    spec.cold = BathSpec::harmonic_field(1.0, 3, 1.0, 1.0);
    spec.work = BathSpec::work_bath(1.0);
    const TricycleModel model = build_tricycle(spec);
    const ThermalGenerator gen = build_generator(model.hamiltonian, model.channels);
    REQUIRE(gen.terms.size() == 3);
    CHECK(gen.terms[0].omega == doctest::Approx(3.0));
    CHECK(gen.terms[1].omega == doctest::Approx(2.0));
    CHECK(gen.terms[2].omega == doctest::Approx(1.0));
    CHECK(gen.bath_ids() == std::vector<std::string>{"hot", "cold", "work"});
}

TEST_CASE("Bohr frequency beyond the bath cutoff raises MissingSpectralValue") {
    const BathSpec narrow = BathSpec::harmonic_field(1.0, 3, 1.0, 1.0, /*cutoff=*/0.5);
    CHECK_THROWS_AS(tls_generator(1.0, narrow), MissingSpectralValue);
}

TEST_CASE("Gibbs state values") {
    const TlsModel tls = build_tls(1.0);
    const DensityOperator gibbs = gibbs_state(tls.hamiltonian, 1.0);
    CHECK(gibbs.matrix()(0, 0).real() == doctest::Approx(0.73106).epsilon(1e-4));
    CHECK(gibbs.matrix()(1, 1).real() == doctest::Approx(0.26894).epsilon(1e-4));

    const DensityOperator hot = gibbs_state(tls.hamiltonian, 1e6);
    CHECK(hot.matrix()(0, 0).real() == doctest::Approx(0.5).epsilon(1e-5));

    Matrix three = Matrix::Zero(3, 3);
    three(1, 1) = 1.0;
    three(2, 2) = 2.0;
    const DensityOperator ladder = gibbs_state(HermitianOperator(three), 1.0);
    CHECK(ladder.matrix()(1, 1).real() / ladder.matrix()(0, 0).real() ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
    CHECK(ladder.matrix()(2, 2).real() / ladder.matrix()(0, 0).real() ==
          doctest::Approx(std::exp(-2.0)).epsilon(1e-10));

    CHECK_THROWS_AS(gibbs_state(tls.hamiltonian, 0.0), DomainError);
}

TEST_CASE("Gibbs state is stationary for a single thermal bath") {
    // TLS, three-level ladder and a truncated oscillator.
    const BathSpec bath = BathSpec::harmonic_field(1.0, 3, 1.0, 1.0);

    const TlsModel tls = build_tls(1.0);
    const ThermalGenerator g1 = build_generator(tls.hamiltonian, {{tls.coupling, bath, "b"}});
    CHECK(g1.apply_schrodinger(gibbs_state(tls.hamiltonian, 1.0).matrix()).cwiseAbs().maxCoeff() <
          1e-9);

    Matrix three = Matrix::Zero(3, 3);
    three(1, 1) = 1.3;
    three(2, 2) = 2.9;
    Matrix ladder = Matrix::Zero(3, 3);
    ladder(0, 1) = 1.0;
    ladder(1, 0) = 1.0;
    ladder(1, 2) = 1.0;
    ladder(2, 1) = 1.0;
    const HermitianOperator h3(three);
    const ThermalGenerator g2 = build_generator(h3, {{HermitianOperator(ladder), bath, "b"}});
    CHECK(g2.apply_schrodinger(gibbs_state(h3, 1.0).matrix()).cwiseAbs().maxCoeff() < 1e-9);

    const OscillatorModel osc = build_oscillator(1.0, 8);
    const ThermalGenerator g3 = build_generator(osc.hamiltonian, {{osc.coupling, bath, "b"}});
    CHECK(g3.apply_schrodinger(gibbs_state(osc.hamiltonian, 1.0).matrix()).cwiseAbs().maxCoeff() <
          1e-9);
}

TEST_CASE("pure decay from the excited state at T = 0") {
    const ThermalGenerator gen = tls_generator(1.0, BathSpec::harmonic_field(0.0, 3, 1.0, 1.0));
    const Matrix rho = DensityOperator::basis_state(2, 1).matrix();
    const Matrix drho = gen.apply_schrodinger(rho);
    CHECK(drho(1, 1).real() == doctest::Approx(-gen.terms[0].gamma_down).epsilon(1e-12));
    CHECK(std::abs(drho.trace()) < 1e-12);
}

TEST_CASE("trace preservation and hermiticity preservation, 100 random states") {
    std::mt19937_64 rng(97);
    const ThermalGenerator gen = tls_generator(1.0, BathSpec::harmonic_field(0.7, 3, 1.0, 1.0));
    for (int i = 0; i < 100; ++i) {
        const Matrix rho = random_density(2, rng).matrix();
        const Matrix out = gen.apply_schrodinger(rho);
        CHECK(std::abs(out.trace()) < 1e-10);
        CHECK(hermiticity_defect(out) < 1e-10);
    }
    // Hermitian in, Hermitian out also for plain Hermitian inputs.
    for (int i = 0; i < 100; ++i) {
        const Matrix a = random_hermitian(2, rng);
        CHECK(hermiticity_defect(gen.apply_schrodinger(a)) < 1e-10);
    }
}

TEST_CASE("Heisenberg picture: unitality and duality with the Schrodinger form") {
    std::mt19937_64 rng(101);
    const TlsModel tls = build_tls(1.3);
    const ThermalGenerator gen = build_generator(
        tls.hamiltonian, {{tls.coupling, BathSpec::harmonic_field(0.9, 3, 1.0, 1.0), "b"}});

    CHECK(gen.apply_heisenberg(Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);

    const DensityOperator gibbs = gibbs_state(tls.hamiltonian, 0.9);
    CHECK(std::abs((gibbs.matrix() * gen.apply_heisenberg(tls.hamiltonian.matrix())).trace()) <
          1e-10);

    for (int i = 0; i < 20; ++i) {
        const Matrix rho = random_density(2, rng).matrix();
        const Matrix obs = random_hermitian(2, rng);
        const double forward = (obs * gen.apply_schrodinger(rho)).trace().real();
        const double adjoint = (rho * gen.apply_heisenberg(obs)).trace().real();
        CHECK(forward == doctest::Approx(adjoint).epsilon(1e-10));
    }
}

TEST_CASE("Davies generator commutes with the Hamiltonian flow") {
    std::mt19937_64 rng(113);
    const TlsModel tls = build_tls(1.0);
    const ThermalGenerator gen = build_generator(
        tls.hamiltonian, {{tls.coupling, BathSpec::harmonic_field(1.2, 3, 1.0, 1.0), "b"}});
    for (double t : {0.3, 1.7}) {
        const Matrix u = hermitian_propagator(tls.hamiltonian, t);
        for (int i = 0; i < 5; ++i) {
            const Matrix rho = random_density(2, rng).matrix();
            const Matrix lhs = gen.apply_dissipator(u * rho * u.adjoint());
            const Matrix rhs = u * gen.apply_dissipator(rho) * u.adjoint();
            CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
        }
    }
}

TEST_CASE("superoperator form matches the direct application") {
    std::mt19937_64 rng(131);
    const TlsModel tls = build_tls(1.0);
    const ThermalGenerator gen = build_generator(
        tls.hamiltonian, {{tls.coupling, BathSpec::harmonic_field(1.0, 3, 1.0, 1.0), "b"}});
    const Matrix l = gen.superop();
    for (int i = 0; i < 10; ++i) {
        const Matrix rho = random_density(2, rng).matrix();
        const Matrix direct = gen.apply_schrodinger(rho);
        const Matrix via_matrix = devectorize(l * vectorize(rho));
        CHECK((direct - via_matrix).cwiseAbs().maxCoeff() < 1e-12);
    }
}
