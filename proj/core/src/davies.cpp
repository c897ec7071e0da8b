#include "qthermo/davies.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>

namespace qthermo {

namespace {

Matrix dissipator_action(const Matrix& a, const Matrix& rho) {
    const Matrix ada = a.adjoint() * a;
    return a * rho * a.adjoint() - 0.5 * (ada * rho + rho * ada);
}

Matrix heisenberg_action(const Matrix& a, const Matrix& op) {
    const Matrix ada = a.adjoint() * a;
    return a.adjoint() * op * a - 0.5 * (ada * op + op * ada);
}

}  // namespace

Matrix ThermalGenerator::apply_dissipator(const Matrix& rho) const {
    if (rho.rows() != dim || rho.cols() != dim) {
        throw DimensionMismatch("ThermalGenerator: state dimension mismatch");
    }
    Matrix out = Matrix::Zero(dim, dim);
    for (const auto& term : terms) {
        if (term.gamma_down != 0.0) out += term.gamma_down * dissipator_action(term.op, rho);
        if (term.gamma_up != 0.0) out += term.gamma_up * dissipator_action(term.op.adjoint(), rho);
    }
    for (const auto& deph : dephasing) {
        if (deph.rate != 0.0) out += deph.rate * dissipator_action(deph.op, rho);
    }
    return out;
}

Matrix ThermalGenerator::apply_bath_dissipator(const std::string& bath_id, const Matrix& rho) const {
    Matrix out = Matrix::Zero(dim, dim);
    for (const auto& term : terms) {
        if (term.bath_id != bath_id) continue;
        if (term.gamma_down != 0.0) out += term.gamma_down * dissipator_action(term.op, rho);
        if (term.gamma_up != 0.0) out += term.gamma_up * dissipator_action(term.op.adjoint(), rho);
    }
    for (const auto& deph : dephasing) {
        if (deph.bath_id == bath_id && deph.rate != 0.0) {
            out += deph.rate * dissipator_action(deph.op, rho);
        }
    }
    return out;
}

Matrix ThermalGenerator::apply_schrodinger(const Matrix& rho) const {
    const Complex mi(0.0, -1.0);
    return mi * (hamiltonian * rho - rho * hamiltonian) + apply_dissipator(rho);
}

Matrix ThermalGenerator::apply_heisenberg(const Matrix& op) const {
    if (op.rows() != dim || op.cols() != dim) {
        throw DimensionMismatch("ThermalGenerator: observable dimension mismatch");
    }
    const Complex pi(0.0, 1.0);
    Matrix out = pi * (hamiltonian * op - op * hamiltonian);
    for (const auto& term : terms) {
        if (term.gamma_down != 0.0) out += term.gamma_down * heisenberg_action(term.op, op);
        if (term.gamma_up != 0.0) out += term.gamma_up * heisenberg_action(term.op.adjoint(), op);
    }
    for (const auto& deph : dephasing) {
        if (deph.rate != 0.0) out += deph.rate * heisenberg_action(deph.op, op);
    }
    return out;
}

Matrix ThermalGenerator::dissipator_superop() const {
    Matrix out = Matrix::Zero(dim * dim, dim * dim);
    for (const auto& term : terms) {
        if (term.gamma_down != 0.0) out += term.gamma_down * superop_dissipator(term.op);
        if (term.gamma_up != 0.0) out += term.gamma_up * superop_dissipator(term.op.adjoint().eval());
    }
    for (const auto& deph : dephasing) {
        if (deph.rate != 0.0) out += deph.rate * superop_dissipator(deph.op);
    }
    return out;
}

Matrix ThermalGenerator::bath_dissipator_superop(const std::string& bath_id) const {
    Matrix out = Matrix::Zero(dim * dim, dim * dim);
    for (const auto& term : terms) {
        if (term.bath_id != bath_id) continue;
        if (term.gamma_down != 0.0) out += term.gamma_down * superop_dissipator(term.op);
        if (term.gamma_up != 0.0) out += term.gamma_up * superop_dissipator(term.op.adjoint().eval());
    }
    for (const auto& deph : dephasing) {
        if (deph.bath_id == bath_id && deph.rate != 0.0) {
            out += deph.rate * superop_dissipator(deph.op);
        }
    }
    return out;
}

Matrix ThermalGenerator::superop() const {
    return superop_commutator(hamiltonian) + dissipator_superop();
}

std::vector<std::string> ThermalGenerator::bath_ids() const {
    std::vector<std::string> ids;
    auto push = [&ids](const std::string& id) {
        if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
    };
    for (const auto& term : terms) push(term.bath_id);
    for (const auto& deph : dephasing) push(deph.bath_id);
    return ids;
}

double ThermalGenerator::bath_temperature(const std::string& bath_id) const {
    for (const auto& term : terms) {
        if (term.bath_id == bath_id) return term.bath_temperature;
    }
    throw DomainError("bath_temperature: unknown bath id '" + bath_id + "'");
}

std::vector<std::pair<double, Matrix>> bohr_jump_operators(const HermitianOperator& coupling,
                                                           const SpectralDecomposition& dec,
                                                           double bin_tol) {
    if (coupling.dim() != dec.dim) {
        throw DimensionMismatch("bohr_jump_operators: coupling and spectrum dimensions differ");
    }
    const Index levels = dec.levels();
    double tol = bin_tol;
    if (tol < 0.0) {
        const double spread = dec.eigenvalues(levels - 1) - dec.eigenvalues(0);
        tol = (spread > 0.0) ? 1e-9 * spread : 1e-14;
    }

    // Collect lowering components P_k S P_l with omega = eps_l - eps_k >= 0,
    // binned by omega within tol.
    std::vector<std::pair<double, Matrix>> bins;
    for (Index k = 0; k < levels; ++k) {
        for (Index l = k; l < levels; ++l) {
            const double omega = dec.eigenvalues(l) - dec.eigenvalues(k);
            Matrix component = dec.projectors[static_cast<size_t>(k)] * coupling.matrix() *
                               dec.projectors[static_cast<size_t>(l)];
            if (component.cwiseAbs().maxCoeff() < 1e-14) continue;
            bool merged = false;
            for (auto& bin : bins) {
                if (std::abs(bin.first - omega) <= tol) {
                    bin.second += component;
                    merged = true;
                    break;
                }
            }
            if (!merged) bins.emplace_back(omega, std::move(component));
        }
    }
    std::sort(bins.begin(), bins.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    // The diagonal (omega = 0) part commutes with H and is Hermitian.
    if (!bins.empty() && bins.front().first <= tol) {
        bins.front().first = 0.0;
        bins.front().second = 0.5 * (bins.front().second + bins.front().second.adjoint().eval());
    }
    return bins;
}

ThermalGenerator build_generator(const HermitianOperator& hamiltonian,
                                 const std::vector<CouplingChannel>& channels,
                                 double degeneracy_tol) {
    ThermalGenerator gen;
    gen.dim = hamiltonian.dim();
    gen.hamiltonian = hamiltonian.matrix();
    gen.provenance = Provenance::Davies;

    const SpectralDecomposition dec = eigendecompose(hamiltonian, degeneracy_tol);
    for (const auto& channel : channels) {
        if (channel.coupling.dim() != gen.dim) {
            throw DimensionMismatch("build_generator: channel dimension mismatch");
        }
        for (auto& [omega, op] : bohr_jump_operators(channel.coupling, dec)) {
            if (omega == 0.0) {
                DephasingTerm deph;
                deph.bath_id = channel.bath_id;
                deph.op = op;
                deph.rate = channel.bath.gamma(0.0);
                gen.dephasing.push_back(std::move(deph));
                continue;
            }
            JumpTerm term;
            term.bath_id = channel.bath_id;
            term.omega = omega;
            term.quasi_omega = omega;
            term.q = 0;
            term.op = op;
            try {
                term.gamma_down = channel.bath.gamma(omega);
                term.gamma_up = channel.bath.gamma(-omega);
            } catch (const FrequencyOutOfRange& e) {
                throw MissingSpectralValue("build_generator: bath '" + channel.bath_id +
                                           "' cannot supply the Bohr frequency: " + e.what());
            }
            term.bath_temperature = channel.bath.temperature;
            term.work_bath = channel.bath.is_work();
            gen.terms.push_back(std::move(term));
        }
    }
    return gen;
}

DensityOperator gibbs_state(const HermitianOperator& hamiltonian, double temperature) {
    if (!(temperature > 0.0)) throw DomainError("gibbs_state: temperature must be > 0");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hamiltonian.matrix());
    const RealVector& eps = solver.eigenvalues();
    RealVector weights(eps.size());
    for (Index k = 0; k < eps.size(); ++k) {
        weights(k) = std::exp(-(eps(k) - eps(0)) / temperature);
    }
    weights /= weights.sum();
    Matrix rho = solver.eigenvectors() * weights.cast<Complex>().asDiagonal() *
                 solver.eigenvectors().adjoint();
    rho = 0.5 * (rho + rho.adjoint().eval());
    rho /= rho.trace().real();
    return DensityOperator(std::move(rho), 1e-12, 1e-12);
}

}  // namespace qthermo
