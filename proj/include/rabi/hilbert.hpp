#pragma once

#include <utility>
#include <variant>

#include "rabi/errors.hpp"
#include "rabi/linalg.hpp"

namespace rabi {

/// Truncated-Fock-space configuration. `cutoff` is the highest retained
/// Fock index; `leak_tol` bounds the total population allowed in the top
/// five Fock levels of any constructed state.
struct FockConfig {
    int cutoff = 120;
    double leak_tol = 1e-7;

    void validate() const;
    int osc_dim() const { return cutoff + 1; }
    int joint_dim() const { return 2 * (cutoff + 1); }
};

/// Dense operator with optional hermitian/unitary tags checked at
/// construction (1e-12 and 1e-10 respectively).
class Operator {
  public:
    Operator() = default;

    static Operator general(Matrix m);
    static Operator hermitian(Matrix m);
    static Operator unitary(Matrix m);

    Eigen::Index dim() const { return mat_.rows(); }
    const Matrix& mat() const { return mat_; }
    bool hermitian_tag() const { return herm_; }
    bool unitary_tag() const { return unit_; }

    Operator adjoint() const;
    Operator operator*(const Operator& rhs) const;

  private:
    Matrix mat_;
    bool herm_ = false;
    bool unit_ = false;
};

/// Pure state of the qubit-oscillator pair. Amplitude layout is
/// qubit-major: entry q*(cutoff+1)+n is qubit level q, Fock level n.
class JointState {
  public:
    static JointState from_amplitudes(int cutoff, Vector amps);
    /// |0> (x) |vac>.
    static JointState ground_vacuum(const FockConfig& cfg);

    int cutoff() const { return cutoff_; }
    const Vector& amps() const { return amps_; }
    int osc_dim() const { return cutoff_ + 1; }

    /// Oscillator amplitudes conditional on qubit level q (not normalized).
    Vector qubit_block(int q) const;

    /// 2x2 reduced qubit density matrix.
    Matrix qubit_reduced() const;

  private:
    JointState(int cutoff, Vector amps) : cutoff_(cutoff), amps_(std::move(amps)) {}
    int cutoff_ = 0;
    Vector amps_;
};

/// Density matrix on the joint space. Trace and Hermiticity are checked at
/// construction; positivity can be checked on demand (it costs an
/// eigendecomposition).
class JointDensity {
  public:
    static JointDensity from_matrix(int cutoff, Matrix rho);
    static JointDensity from_pure(const JointState& psi);

    int cutoff() const { return cutoff_; }
    const Matrix& rho() const { return rho_; }
    int osc_dim() const { return cutoff_ + 1; }

    /// Smallest eigenvalue (Hermitian solve; use sparingly).
    double min_eigenvalue() const;

  private:
    JointDensity(int cutoff, Matrix rho) : cutoff_(cutoff), rho_(std::move(rho)) {}
    int cutoff_ = 0;
    Matrix rho_;
};

/// Oscillator-only state, either a pure amplitude vector or a density
/// matrix on the truncated space.
class OscillatorState {
  public:
    static OscillatorState pure(int cutoff, Vector amps);
    static OscillatorState mixed(int cutoff, Matrix rho);

    int cutoff() const { return cutoff_; }
    int dim() const { return cutoff_ + 1; }
    bool is_pure() const { return std::holds_alternative<Vector>(data_); }
    const Vector& amps() const { return std::get<Vector>(data_); }
    const Matrix& rho() const { return std::get<Matrix>(data_); }

    /// Density-matrix view (materializes |psi><psi| for pure states).
    Matrix density_matrix() const;

    /// Tr rho^2 (1 for pure states up to normalization error).
    double purity() const;

    /// Total population in the top five Fock levels.
    double top_level_population() const;

  private:
    OscillatorState(int cutoff, Vector v) : cutoff_(cutoff), data_(std::move(v)) {}
    OscillatorState(int cutoff, Matrix m) : cutoff_(cutoff), data_(std::move(m)) {}
    int cutoff_ = 0;
    std::variant<Vector, Matrix> data_;
};

// --- operator constructors -------------------------------------------------

/// a[n-1, n] = sqrt(n).
Operator annihilation(const FockConfig& cfg);
Operator creation(const FockConfig& cfg);
/// diag(0, 1, ..., cutoff).
Operator number_op(const FockConfig& cfg);
Operator identity_op(int dim);

/// Hermitian X = (a + a^dag)/sqrt(2) and P = (a - a^dag)/(i sqrt(2));
/// [X, P] = i on the subspace below the cutoff corner.
std::pair<Operator, Operator> quadratures(const FockConfig& cfg);

/// Pauli matrices in the convention sigma_z|0> = +|0>.
Operator pauli_x();
Operator pauli_y();
Operator pauli_z();

/// Qubit-major Kronecker embedding consistent with JointState indexing.
Operator tensor_qubit_osc(const Operator& q, const Operator& b);

// --- state constructors ----------------------------------------------------

OscillatorState vacuum(const FockConfig& cfg);
OscillatorState fock_state(int n, const FockConfig& cfg);

/// Coherent state, amplitudes exp(-|alpha|^2/2) alpha^n / sqrt(n!),
/// renormalized on the truncated space. Throws LeakError if the truncated
/// norm deficit exceeds cfg.leak_tol.
OscillatorState coherent(Complex alpha, const FockConfig& cfg);

/// P-squeezed vacuum with variance <P^2> = Delta^2/2,
/// Delta^2 = 10^(-delta_db/10), built by exact matrix exponential of the
/// squeeze generator (r/2)(a^dag^2 - a^2), r = delta_db ln(10)/20.
OscillatorState squeezed_vacuum(double delta_db, const FockConfig& cfg);

// --- reductions ------------------------------------------------------------

OscillatorState partial_trace_qubit(const JointDensity& rho);
OscillatorState partial_trace_qubit(const JointState& psi);

/// Conditional oscillator state and Born probability for a qubit
/// measurement outcome in the sigma_z basis.
std::pair<OscillatorState, double> project_qubit(const JointState& s, int outcome);
std::pair<OscillatorState, double> project_qubit(const JointDensity& s, int outcome);

}  // namespace rabi
