#include "rabi/lindblad.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace rabi {

void NoiseModel::validate() const {
    if (gamma_T < 0.0) throw ConfigError("gamma_T must be non-negative");
    if (!std::isfinite(gamma_T)) throw ConfigError("gamma_T must be finite");
}

NoiseKind noise_kind_from_string(const std::string& s) {
    if (s == "none") return NoiseKind::None;
    if (s == "boson_loss") return NoiseKind::BosonLoss;
    if (s == "boson_dephasing") return NoiseKind::BosonDephasing;
    if (s == "boson_heating") return NoiseKind::BosonHeating;
    if (s == "qubit_decay") return NoiseKind::QubitDecay;
    if (s == "qubit_dephasing") return NoiseKind::QubitDephasing;
    throw ConfigError("unknown noise kind '" + s + "'");
}

std::string to_string(NoiseKind k) {
    switch (k) {
        case NoiseKind::None: return "none";
        case NoiseKind::BosonLoss: return "boson_loss";
        case NoiseKind::BosonDephasing: return "boson_dephasing";
        case NoiseKind::BosonHeating: return "boson_heating";
        case NoiseKind::QubitDecay: return "qubit_decay";
        case NoiseKind::QubitDephasing: return "qubit_dephasing";
    }
    throw ConfigError("unknown noise kind");
}

std::vector<Operator> lindblad_ops(const NoiseModel& m, const FockConfig& cfg) {
    m.validate();
    cfg.validate();
    double g = std::sqrt(m.gamma_T);
    int d = cfg.osc_dim();
    Matrix id2 = Matrix::Identity(2, 2);
    Matrix idb = Matrix::Identity(d, d);
    Matrix a = annihilation(cfg).mat();

    switch (m.kind) {
        case NoiseKind::None:
            return {};
        case NoiseKind::BosonLoss:
            return {Operator::general(g * kron(id2, a))};
        case NoiseKind::BosonDephasing:
            return {Operator::general(g * kron(id2, Matrix(a * a.adjoint() + a.adjoint() * a)))};
        case NoiseKind::BosonHeating:
            return {Operator::general(g * kron(id2, a)),
                    Operator::general(g * kron(id2, Matrix(a.adjoint())))};
        case NoiseKind::QubitDecay: {
            Matrix lower(2, 2);
            if (m.decay_convention == QubitDecayConvention::LowerTo0)
                lower << 0, 1, 0, 0;  // (sigma_x + i sigma_y)/2: |1> -> |0>
            else
                lower << 0, 0, 1, 0;
            return {Operator::general(g * kron(lower, idb))};
        }
        case NoiseKind::QubitDephasing:
            return {Operator::general(g * kron(pauli_z().mat(), idb))};
    }
    throw ConfigError("unknown noise kind");
}

double SegmentPlan::total_duration() const {
    double t = 0.0;
    for (const auto& s : segments) t += s.duration;
    return t;
}

SegmentPlan schedule_to_segments(const InteractionSchedule& s) {
    s.validate();
    SegmentPlan plan;
    for (int k = 0; k < s.N; ++k) {
        if (s.u[k] != 0.0)
            plan.segments.push_back(
                {GeneratorKind::PSigmaX, s.u[k] > 0 ? 1 : -1, std::abs(s.u[k])});
        if (s.v[k] != 0.0)
            plan.segments.push_back(
                {GeneratorKind::XSigmaY, s.v[k] > 0 ? 1 : -1, std::abs(s.v[k])});
    }
    return plan;
}

namespace {

// Sparse sigma_x (x) P and sigma_y (x) X in the qubit-major layout.
SparseMatrix joint_generator(GeneratorKind kind, int d) {
    std::vector<Eigen::Triplet<Complex>> t;
    const double inv = 1.0 / std::sqrt(2.0);
    auto add_block = [&](int qi, int qj, Complex qfac) {
        for (int n = 1; n < d; ++n) {
            double r = std::sqrt(double(n)) * inv;
            Complex lo, hi;  // (n-1, n) and (n, n-1) oscillator entries
            if (kind == GeneratorKind::PSigmaX) {
                lo = Complex(0, -r);
                hi = Complex(0, r);
            } else {
                lo = Complex(r, 0);
                hi = Complex(r, 0);
            }
            t.emplace_back(qi * d + n - 1, qj * d + n, qfac * lo);
            t.emplace_back(qi * d + n, qj * d + n - 1, qfac * hi);
        }
    };
    if (kind == GeneratorKind::PSigmaX) {
        add_block(0, 1, 1.0);
        add_block(1, 0, 1.0);
    } else {
        add_block(0, 1, Complex(0, -1));
        add_block(1, 0, Complex(0, 1));
    }
    SparseMatrix m(2 * d, 2 * d);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

struct MasterWorkspace {
    SparseMatrix gen_u, gen_v;
    std::vector<SparseMatrix> ls, ls_adj;
    SparseMatrix k_sum;
    bool has_noise = false;

    // rho stays Hermitian throughout, so rho*H = (H*rho)^dagger etc.
    Matrix rhs(const SparseMatrix* h, const Matrix& rho) const {
        Matrix out;
        if (h) {
            Matrix hr = (*h) * rho;
            out.noalias() = Complex(0, -1) * (hr - hr.adjoint());
        } else {
            out = Matrix::Zero(rho.rows(), rho.cols());
        }
        if (has_noise) {
            for (size_t j = 0; j < ls.size(); ++j) {
                Matrix lr = ls[j] * rho;
                out.noalias() += lr * ls_adj[j];
            }
            Matrix kr = k_sum * rho;
            out.noalias() -= 0.5 * (kr + kr.adjoint());
        }
        return out;
    }
};

void check_density_leak(const Matrix& rho, const FockConfig& cfg) {
    int d = cfg.osc_dim();
    double pop = 0.0;
    for (int q = 0; q < 2; ++q)
        for (int n = std::max(0, d - 5); n < d; ++n) pop += rho(q * d + n, q * d + n).real();
    if (pop > cfg.leak_tol)
        throw LeakError("noisy evolution puts " + std::to_string(pop) +
                        " in the top Fock levels (leak_tol " +
                        std::to_string(cfg.leak_tol) + ")");
}

Matrix integrate_once(Matrix rho, const SegmentPlan& plan, const MasterWorkspace& w,
                      double dt_cap) {
    double step_cap = std::min(dt_cap, 1e-2);
    Matrix k1, k2, k3, k4;
    for (const auto& seg : plan.segments) {
        SparseMatrix h;
        const SparseMatrix* hp = nullptr;
        if (seg.generator != GeneratorKind::Free) {
            const SparseMatrix& base =
                seg.generator == GeneratorKind::PSigmaX ? w.gen_u : w.gen_v;
            h = (-double(seg.sign)) * base;
            hp = &h;
        }
        long n = std::max<long>(50, static_cast<long>(std::ceil(seg.duration / step_cap)));
        double hstep = seg.duration / n;
        for (long i = 0; i < n; ++i) {
            k1 = w.rhs(hp, rho);
            k2 = w.rhs(hp, Matrix(rho + 0.5 * hstep * k1));
            k3 = w.rhs(hp, Matrix(rho + 0.5 * hstep * k2));
            k4 = w.rhs(hp, Matrix(rho + hstep * k3));
            rho += (hstep / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            hermitize(rho);
            // A divergent attempt amplifies by orders of magnitude per step;
            // hand it back early instead of grinding through the rest.
            if ((i & 31) == 0 && !(max_abs(rho) < 1e3)) return rho;
        }
    }
    return rho;
}

}  // namespace

JointDensity evolve_master(const JointDensity& rho0, const SegmentPlan& plan,
                           const NoiseModel& m, const FockConfig& cfg, double dt) {
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (rho0.cutoff() != cfg.cutoff) throw DimensionError("density cutoff mismatch");
    m.validate();

    MasterWorkspace w;
    int d = cfg.osc_dim();
    w.gen_u = joint_generator(GeneratorKind::PSigmaX, d);
    w.gen_v = joint_generator(GeneratorKind::XSigmaY, d);
    auto ops = lindblad_ops(m, cfg);
    if (!ops.empty()) {
        w.has_noise = true;
        SparseMatrix k(2 * d, 2 * d);
        for (const auto& op : ops) {
            SparseMatrix l = sparsify(op.mat(), 1e-15);
            SparseMatrix ladj = l.adjoint();
            SparseMatrix prod = ladj * l;
            k = SparseMatrix(k + prod);
            w.ls.push_back(std::move(l));
            w.ls_adj.push_back(std::move(ladj));
        }
        w.k_sum = std::move(k);
    }

    // RK4 is stability-limited, not accuracy-limited, here: a diagonal
    // Lindblad operator with entries l_n decays the (n,m) coherence at
    // (l_n - l_m)^2 / 2, which reaches 2 gamma cutoff^2 for boson dephasing
    // even though every physically occupied coherence moves far slower.
    // Start from a step inside the stability region (|z| < 2.785 on the
    // real axis, 0.8 margin) instead of discovering it by halving, and
    // refuse configurations needing more than the 2^6 reduction the halving
    // loop could reach anyway -- callers opt in by passing a smaller dt.
    double stiffness = 0.0;
    for (const auto& op : ops) {
        const Matrix& l = op.mat();
        Matrix off = l;
        off.diagonal().setZero();
        if (max_abs(off) < 1e-14 && l.diagonal().imag().cwiseAbs().maxCoeff() < 1e-14) {
            auto diag = l.diagonal().real();
            double spread = diag.maxCoeff() - diag.minCoeff();
            stiffness += 0.5 * spread * spread;
        } else {
            double one = l.cwiseAbs().colwise().sum().maxCoeff();
            double inf = l.cwiseAbs().rowwise().sum().maxCoeff();
            stiffness += 2.0 * one * inf;
        }
    }
    if (stiffness > 0.0) {
        double stable = 0.8 * 2.785 / stiffness;
        if (stable < dt) {
            if (stable * 64.0 < dt) {
                char msg[160];
                std::snprintf(msg, sizeof msg,
                              "noise generator needs step %.3g for stability, "
                              "more than 64x below dt %.3g",
                              stable, dt);
                throw IntegratorDivergedError(msg);
            }
            dt = stable;
        }
    }

    for (int attempt = 0; attempt <= 6; ++attempt) {
        Matrix rho = integrate_once(rho0.rho(), plan, w, dt / std::pow(2.0, attempt));
        double drift = std::abs(rho.trace().real() - 1.0);
        bool bounded = rho.allFinite() && max_abs(rho) < 1e3;
        if (bounded && drift < 1e-6) {
            check_density_leak(rho, cfg);
            return JointDensity::from_matrix(cfg.cutoff, std::move(rho));
        }
    }
    throw IntegratorDivergedError("integration fails to settle after 6 dt halvings");
}

ProtocolResult run_noisy_protocol(const InteractionSchedule& s, const NoiseModel& m,
                                  const FockConfig& cfg, double dt) {
    s.validate();
    auto plan = schedule_to_segments(s);
    auto rho0 = JointDensity::from_pure(JointState::ground_vacuum(cfg));
    auto rho = evolve_master(rho0, plan, m, cfg, dt);
    auto [post, prob] = project_qubit(rho, 0);
    return ProtocolResult{rho, partial_trace_qubit(rho), std::move(post), prob};
}

}  // namespace rabi
