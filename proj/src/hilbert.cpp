#include "rabi/hilbert.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

namespace rabi {

namespace {

constexpr double kHermTol = 1e-12;
constexpr double kUnitTol = 1e-10;
constexpr double kNormTol = 1e-10;
constexpr double kTraceTol = 1e-6;
constexpr double kDensHermTol = 1e-8;

void check_leak(const Vector& amps, const FockConfig& cfg, const char* what) {
    double pop = 0.0;
    int dim = static_cast<int>(amps.size());
    for (int n = std::max(0, dim - 5); n < dim; ++n) pop += std::norm(amps[n]);
    if (pop > cfg.leak_tol)
        throw LeakError(std::string(what) + ": top-level population " +
                        std::to_string(pop) + " exceeds leak_tol " +
                        std::to_string(cfg.leak_tol));
}

}  // namespace

void FockConfig::validate() const {
    if (cutoff < 8) throw ConfigError("cutoff must be >= 8");
    if (!(leak_tol > 0.0)) throw ConfigError("leak_tol must be positive");
}

// --- Operator ----------------------------------------------------------------

Operator Operator::general(Matrix m) {
    if (m.rows() != m.cols()) throw DimensionError("operator must be square");
    Operator op;
    op.mat_ = std::move(m);
    return op;
}

Operator Operator::hermitian(Matrix m) {
    Operator op = general(std::move(m));
    double d = hermiticity_defect(op.mat_);
    if (d > kHermTol)
        throw NotHermitianError("hermiticity defect " + std::to_string(d));
    op.herm_ = true;
    return op;
}

Operator Operator::unitary(Matrix m) {
    Operator op = general(std::move(m));
    double d = unitarity_defect(op.mat_);
    if (d > kUnitTol)
        throw NotHermitianError("unitarity defect " + std::to_string(d));
    op.unit_ = true;
    return op;
}

Operator Operator::adjoint() const {
    Operator op;
    op.mat_ = mat_.adjoint();
    op.herm_ = herm_;
    op.unit_ = unit_;
    return op;
}

Operator Operator::operator*(const Operator& rhs) const {
    if (dim() != rhs.dim()) throw DimensionError("operator product dimension mismatch");
    Operator op;
    op.mat_ = mat_ * rhs.mat_;
    op.unit_ = unit_ && rhs.unit_;
    return op;
}

// --- JointState / JointDensity ----------------------------------------------

JointState JointState::from_amplitudes(int cutoff, Vector amps) {
    if (amps.size() != 2 * (cutoff + 1))
        throw DimensionError("joint amplitude vector has wrong length");
    double n = amps.norm();
    if (std::abs(n - 1.0) > kNormTol)
        throw NonPositiveError("joint state norm " + std::to_string(n) + " != 1");
    return JointState(cutoff, std::move(amps));
}

JointState JointState::ground_vacuum(const FockConfig& cfg) {
    cfg.validate();
    Vector amps = Vector::Zero(cfg.joint_dim());
    amps[0] = 1.0;
    return JointState(cfg.cutoff, std::move(amps));
}

Vector JointState::qubit_block(int q) const {
    if (q != 0 && q != 1) throw ConfigError("qubit index must be 0 or 1");
    return amps_.segment(q * osc_dim(), osc_dim());
}

Matrix JointState::qubit_reduced() const {
    Matrix r(2, 2);
    Vector b0 = qubit_block(0), b1 = qubit_block(1);
    r(0, 0) = b0.squaredNorm();
    r(1, 1) = b1.squaredNorm();
    r(0, 1) = b0.dot(b1);  // Eigen dot conjugates the left argument
    r(1, 0) = std::conj(r(0, 1));
    return r;
}

JointDensity JointDensity::from_matrix(int cutoff, Matrix rho) {
    int dim = 2 * (cutoff + 1);
    if (rho.rows() != dim || rho.cols() != dim)
        throw DimensionError("joint density matrix has wrong shape");
    double hd = hermiticity_defect(rho);
    if (!(hd <= kDensHermTol)) throw NotHermitianError("density hermiticity defect " + std::to_string(hd));
    double tr = rho.trace().real();
    if (!(std::abs(tr - 1.0) <= kTraceTol))
        throw NonPositiveError("density trace " + std::to_string(tr) + " != 1");
    return JointDensity(cutoff, std::move(rho));
}

JointDensity JointDensity::from_pure(const JointState& psi) {
    Matrix rho = psi.amps() * psi.amps().adjoint();
    return JointDensity(psi.cutoff(), std::move(rho));
}

double JointDensity::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

// --- OscillatorState ----------------------------------------------------------

OscillatorState OscillatorState::pure(int cutoff, Vector amps) {
    if (amps.size() != cutoff + 1)
        throw DimensionError("oscillator amplitude vector has wrong length");
    double n = amps.norm();
    if (std::abs(n - 1.0) > kNormTol)
        throw NonPositiveError("oscillator state norm " + std::to_string(n) + " != 1");
    return OscillatorState(cutoff, std::move(amps));
}

OscillatorState OscillatorState::mixed(int cutoff, Matrix rho) {
    if (rho.rows() != cutoff + 1 || rho.cols() != cutoff + 1)
        throw DimensionError("oscillator density matrix has wrong shape");
    double hd = hermiticity_defect(rho);
    if (!(hd <= kDensHermTol)) throw NotHermitianError("density hermiticity defect " + std::to_string(hd));
    double tr = rho.trace().real();
    if (!(std::abs(tr - 1.0) <= kTraceTol))
        throw NonPositiveError("density trace " + std::to_string(tr) + " != 1");
    return OscillatorState(cutoff, std::move(rho));
}

Matrix OscillatorState::density_matrix() const {
    if (is_pure()) return amps() * amps().adjoint();
    return rho();
}

double OscillatorState::purity() const {
    if (is_pure()) {
        double n2 = amps().squaredNorm();
        return n2 * n2;
    }
    return (rho() * rho()).trace().real();
}

double OscillatorState::top_level_population() const {
    int d = dim();
    double pop = 0.0;
    if (is_pure()) {
        for (int n = std::max(0, d - 5); n < d; ++n) pop += std::norm(amps()[n]);
    } else {
        for (int n = std::max(0, d - 5); n < d; ++n) pop += rho()(n, n).real();
    }
    return pop;
}

// --- operator constructors -----------------------------------------------------

Operator annihilation(const FockConfig& cfg) {
    cfg.validate();
    Matrix a = Matrix::Zero(cfg.osc_dim(), cfg.osc_dim());
    for (int n = 1; n <= cfg.cutoff; ++n) a(n - 1, n) = std::sqrt(double(n));
    return Operator::general(std::move(a));
}

Operator creation(const FockConfig& cfg) { return annihilation(cfg).adjoint(); }

Operator number_op(const FockConfig& cfg) {
    cfg.validate();
    Matrix n = Matrix::Zero(cfg.osc_dim(), cfg.osc_dim());
    for (int k = 0; k <= cfg.cutoff; ++k) n(k, k) = double(k);
    return Operator::hermitian(std::move(n));
}

Operator identity_op(int dim) { return Operator::unitary(Matrix::Identity(dim, dim)); }

std::pair<Operator, Operator> quadratures(const FockConfig& cfg) {
    Matrix a = annihilation(cfg).mat();
    Matrix ad = a.adjoint();
    Matrix x = (a + ad) / std::sqrt(2.0);
    Matrix p = (a - ad) / (Complex(0, 1) * std::sqrt(2.0));
    return {Operator::hermitian(std::move(x)), Operator::hermitian(std::move(p))};
}

Operator pauli_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return Operator::hermitian(std::move(m));
}

Operator pauli_y() {
    Matrix m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return Operator::hermitian(std::move(m));
}

Operator pauli_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return Operator::hermitian(std::move(m));
}

Operator tensor_qubit_osc(const Operator& q, const Operator& b) {
    if (q.dim() != 2) throw DimensionError("qubit factor must be 2x2");
    Operator op = Operator::general(kron(q.mat(), b.mat()));
    if (q.hermitian_tag() && b.hermitian_tag())
        return Operator::hermitian(op.mat());
    if (q.unitary_tag() && b.unitary_tag())
        return Operator::unitary(op.mat());
    return op;
}

// --- state constructors ----------------------------------------------------------

OscillatorState vacuum(const FockConfig& cfg) {
    cfg.validate();
    Vector v = Vector::Zero(cfg.osc_dim());
    v[0] = 1.0;
    return OscillatorState::pure(cfg.cutoff, std::move(v));
}

OscillatorState fock_state(int n, const FockConfig& cfg) {
    cfg.validate();
    if (n < 0 || n > cfg.cutoff) throw ConfigError("fock index out of range");
    Vector v = Vector::Zero(cfg.osc_dim());
    v[n] = 1.0;
    return OscillatorState::pure(cfg.cutoff, std::move(v));
}

OscillatorState coherent(Complex alpha, const FockConfig& cfg) {
    cfg.validate();
    Vector v(cfg.osc_dim());
    // Log-space magnitudes: the direct recurrence starts from e^{-|alpha|^2/2},
    // which underflows beyond |alpha| ~ 38.
    double la = 0.5 * std::log(std::norm(alpha));
    double ph = std::arg(alpha);
    double log_mag = -0.5 * std::norm(alpha);
    if (alpha == Complex(0, 0)) {
        v.setZero();
        v[0] = 1.0;
    } else {
        for (int n = 0; n <= cfg.cutoff; ++n) {
            if (n > 0) log_mag += la - 0.5 * std::log(double(n));
            v[n] = std::polar(std::exp(log_mag), ph * n);
        }
    }
    double n2 = v.squaredNorm();
    if (1.0 - n2 > cfg.leak_tol)
        throw LeakError("coherent state truncation deficit " + std::to_string(1.0 - n2));
    check_leak(v, cfg, "coherent");
    v /= std::sqrt(n2);
    return OscillatorState::pure(cfg.cutoff, std::move(v));
}

OscillatorState squeezed_vacuum(double delta_db, const FockConfig& cfg) {
    cfg.validate();
    if (delta_db < 0.0) throw ConfigError("squeezing level must be non-negative");
    double r = delta_db * std::log(10.0) / 20.0;

    // Generator (r/2)(a^dag^2 - a^2) is anti-Hermitian and tridiagonal in the
    // even Fock ladder; build sparse and exponentiate onto the vacuum.
    int d = cfg.osc_dim();
    std::vector<Eigen::Triplet<Complex>> trips;
    for (int n = 0; n + 2 < d + 1 && n + 2 <= cfg.cutoff; ++n) {
        double c = 0.5 * r * std::sqrt(double(n + 1) * double(n + 2));
        trips.emplace_back(n + 2, n, Complex(c, 0));   // a^dag^2 part
        trips.emplace_back(n, n + 2, Complex(-c, 0));  // -a^2 part
    }
    SparseMatrix gen(d, d);
    gen.setFromTriplets(trips.begin(), trips.end());

    Vector v = Vector::Zero(d);
    v[0] = 1.0;
    v = expm_apply_antihermitian(gen, v);

    check_leak(v, cfg, "squeezed_vacuum");
    v /= v.norm();
    return OscillatorState::pure(cfg.cutoff, std::move(v));
}

// --- reductions -----------------------------------------------------------------

OscillatorState partial_trace_qubit(const JointDensity& rho) {
    int d = rho.osc_dim();
    Matrix out = rho.rho().topLeftCorner(d, d) + rho.rho().bottomRightCorner(d, d);
    hermitize(out);
    return OscillatorState::mixed(rho.cutoff(), std::move(out));
}

OscillatorState partial_trace_qubit(const JointState& psi) {
    Vector b0 = psi.qubit_block(0), b1 = psi.qubit_block(1);
    Matrix out = b0 * b0.adjoint() + b1 * b1.adjoint();
    hermitize(out);
    return OscillatorState::mixed(psi.cutoff(), std::move(out));
}

std::pair<OscillatorState, double> project_qubit(const JointState& s, int outcome) {
    if (outcome != 0 && outcome != 1) throw ConfigError("qubit outcome must be 0 or 1");
    Vector b = s.qubit_block(outcome);
    double p = b.squaredNorm();
    if (p < 1e-12)
        throw ZeroProbabilityError("qubit outcome probability " + std::to_string(p));
    b /= std::sqrt(p);
    return {OscillatorState::pure(s.cutoff(), std::move(b)), p};
}

std::pair<OscillatorState, double> project_qubit(const JointDensity& s, int outcome) {
    if (outcome != 0 && outcome != 1) throw ConfigError("qubit outcome must be 0 or 1");
    int d = s.osc_dim();
    Matrix blk = outcome == 0 ? s.rho().topLeftCorner(d, d)
                              : s.rho().bottomRightCorner(d, d);
    double p = blk.trace().real();
    if (p < 1e-12)
        throw ZeroProbabilityError("qubit outcome probability " + std::to_string(p));
    Matrix out = blk / p;
    hermitize(out);
    return {OscillatorState::mixed(s.cutoff(), std::move(out)), p};
}

}  // namespace rabi
