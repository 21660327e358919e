#include "rabi/gates.hpp"

#include <Eigen/Eigenvalues>

namespace rabi {

Operator expi_hermitian(const Operator& h, double theta) {
    if (!h.hermitian_tag()) throw NotHermitianError("expi_hermitian needs a hermitian operator");
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.mat());
    Vector phase = (Complex(0, 1) * theta * es.eigenvalues().cast<Complex>()).array().exp();
    Matrix u = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
    return Operator::unitary(std::move(u));
}

GateSet::GateSet(const FockConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    auto [X, P] = quadratures(cfg_);
    gen_u_ = kron(pauli_x().mat(), P.mat());
    gen_v_ = kron(pauli_y().mat(), X.mat());
    cache_u_ = decompose(gen_u_);
    cache_v_ = decompose(gen_v_);
}

GateSet::EigenCache GateSet::decompose(const Matrix& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    return {es.eigenvalues(), es.eigenvectors()};
}

Vector GateSet::apply_cached(const EigenCache& c, double theta, const Vector& x) {
    Vector y = c.evecs.adjoint() * x;
    y.array() *= (Complex(0, 1) * theta * c.evals.cast<Complex>()).array().exp();
    return c.evecs * y;
}

Matrix GateSet::materialize(const EigenCache& c, double theta) {
    Vector phase = (Complex(0, 1) * theta * c.evals.cast<Complex>()).array().exp();
    return c.evecs * phase.asDiagonal() * c.evecs.adjoint();
}

Vector GateSet::apply_u(double u, const Vector& amps) const {
    return apply_cached(cache_u_, u, amps);
}

Vector GateSet::apply_v(double v, const Vector& amps) const {
    return apply_cached(cache_v_, v, amps);
}

JointState GateSet::apply_rabi_u(double u, const JointState& s) const {
    if (s.cutoff() != cfg_.cutoff) throw DimensionError("state cutoff mismatch");
    return JointState::from_amplitudes(cfg_.cutoff, apply_u(u, s.amps()));
}

JointState GateSet::apply_rabi_v(double v, const JointState& s) const {
    if (s.cutoff() != cfg_.cutoff) throw DimensionError("state cutoff mismatch");
    return JointState::from_amplitudes(cfg_.cutoff, apply_v(v, s.amps()));
}

Operator GateSet::rabi_u(double u) const {
    return Operator::unitary(materialize(cache_u_, u));
}

Operator GateSet::rabi_v(double v) const {
    return Operator::unitary(materialize(cache_v_, v));
}

}  // namespace rabi
