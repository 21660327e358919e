#include "rabi/protocol.hpp"

#include <cmath>
#include <string>

namespace rabi {

void InteractionSchedule::validate() const {
    if (N < 1) throw ConfigError("schedule needs N >= 1");
    if (static_cast<int>(u.size()) != N || static_cast<int>(v.size()) != N)
        throw ConfigError("schedule u/v lengths must equal N");
    for (double x : u)
        if (!std::isfinite(x)) throw ConfigError("non-finite u entry");
    for (double x : v)
        if (!std::isfinite(x)) throw ConfigError("non-finite v entry");
    if (L && !(*L > 0.0)) throw ConfigError("L must be positive when present");
}

double InteractionSchedule::total_duration() const {
    double t = 0.0;
    for (double x : u) t += std::abs(x);
    for (double x : v) t += std::abs(x);
    return t;
}

InteractionSchedule analytic_schedule(int N, double L) {
    if (N < 1) throw ConfigError("analytic schedule needs N >= 1");
    if (!(L > 0.0)) throw ConfigError("analytic schedule needs L > 0");
    InteractionSchedule s;
    s.N = N;
    s.L = L;
    s.u.resize(N);
    s.v.resize(N);
    const double root2 = std::sqrt(2.0);
    for (int k = 1; k <= N; ++k) {
        s.u[k - 1] = (k == 1 ? 1.0 : -1.0) * std::pow(2.0, N - k) * root2 * L;
        s.v[k - 1] = (k == N ? -1.0 : std::pow(2.0, -(N - k))) * M_PI / (4.0 * root2 * L);
    }
    s.validate();
    return s;
}

namespace {

void check_joint_leak(const Vector& amps, const FockConfig& cfg) {
    int d = cfg.osc_dim();
    double pop = 0.0;
    for (int q = 0; q < 2; ++q)
        for (int n = std::max(0, d - 5); n < d; ++n) pop += std::norm(amps[q * d + n]);
    if (pop > cfg.leak_tol)
        throw LeakError("protocol state puts " + std::to_string(pop) +
                        " in the top Fock levels (leak_tol " +
                        std::to_string(cfg.leak_tol) + ")");
}

}  // namespace

ProtocolResult run_unitary(const InteractionSchedule& s, const GateSet& gates) {
    s.validate();
    const FockConfig& cfg = gates.config();
    Vector amps = JointState::ground_vacuum(cfg).amps();
    for (int k = 0; k < s.N; ++k) {
        amps = gates.apply_u(s.u[k], amps);
        check_joint_leak(amps, cfg);
        amps = gates.apply_v(s.v[k], amps);
        check_joint_leak(amps, cfg);
    }
    JointState joint = JointState::from_amplitudes(cfg.cutoff, std::move(amps));
    auto [post, prob] = project_qubit(joint, 0);
    ProtocolResult r{joint, partial_trace_qubit(joint), std::move(post), prob};
    return r;
}

ProtocolResult run_unitary(const InteractionSchedule& s, const FockConfig& cfg) {
    return run_unitary(s, GateSet(cfg));
}

int peak_count_check(const InteractionSchedule& s, const FockConfig& cfg) {
    s.validate();
    if (!s.L || std::pow(2.0, s.N) * *s.L < 6.0)
        throw RegimeError("peak counting needs the well-separated regime 2^N L >= 6");

    auto result = run_unitary(s, cfg);
    double extent = std::sqrt(2.0) * (std::pow(2.0, s.N) - 1.0) * *s.L + 6.0;
    int n_points = 2 * static_cast<int>(std::ceil(extent / 0.01)) + 1;
    auto grid = x_density(result.deterministic_osc, -extent, extent, n_points);

    // Strict local maxima above a noise floor; plateaus collapse to one peak.
    double floor = 1e-9 * grid.values.maxCoeff();
    int peaks = 0;
    bool rising = false;
    for (int i = 1; i < grid.n_points; ++i) {
        double d = grid.values[i] - grid.values[i - 1];
        if (d > 0.0) {
            rising = true;
        } else if (d < 0.0) {
            if (rising && grid.values[i - 1] > floor) ++peaks;
            rising = false;
        }
    }
    return peaks;
}

}  // namespace rabi
