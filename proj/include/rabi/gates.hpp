#pragma once

#include "rabi/hilbert.hpp"

namespace rabi {

/// exp(i theta H) for Hermitian H, via eigendecomposition.
Operator expi_hermitian(const Operator& h, double theta);

/// Rabi-gate factory for a fixed Fock configuration. The two joint
/// generators sigma_x (x) P and sigma_y (x) X are eigendecomposed once at
/// construction, so applying a gate for any strength costs two dense
/// matrix-vector products.
class GateSet {
  public:
    explicit GateSet(const FockConfig& cfg);

    const FockConfig& config() const { return cfg_; }

    /// exp(i u P sigma_x) |psi>.
    JointState apply_rabi_u(double u, const JointState& s) const;
    /// exp(i v X sigma_y) |psi>.
    JointState apply_rabi_v(double v, const JointState& s) const;

    /// Unchecked amplitude-vector fast paths for hot loops.
    Vector apply_u(double u, const Vector& amps) const;
    Vector apply_v(double v, const Vector& amps) const;

    /// Materialized unitaries (for tests and small problems).
    Operator rabi_u(double u) const;
    Operator rabi_v(double v) const;

    const Matrix& generator_u() const { return gen_u_; }
    const Matrix& generator_v() const { return gen_v_; }

  private:
    struct EigenCache {
        RealVector evals;
        Matrix evecs;
    };
    static EigenCache decompose(const Matrix& h);
    static Vector apply_cached(const EigenCache& c, double theta, const Vector& x);
    static Matrix materialize(const EigenCache& c, double theta);

    FockConfig cfg_;
    Matrix gen_u_, gen_v_;
    EigenCache cache_u_, cache_v_;
};

}  // namespace rabi
