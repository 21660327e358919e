#pragma once

#include "rabi/protocol.hpp"

namespace rabi {

enum class NoiseKind {
    None,
    BosonLoss,
    BosonDephasing,
    BosonHeating,
    QubitDecay,
    QubitDephasing,
};

/// Which qubit level the decay operator lowers into. LowerTo0 is the
/// literal (sigma_x + i sigma_y)/2 in the sigma_z|0> = +|0> convention.
enum class QubitDecayConvention { LowerTo0, LowerTo1 };

struct NoiseModel {
    NoiseKind kind = NoiseKind::None;
    double gamma_T = 0.0;
    QubitDecayConvention decay_convention = QubitDecayConvention::LowerTo0;

    void validate() const;
};

NoiseKind noise_kind_from_string(const std::string& s);
std::string to_string(NoiseKind k);

/// Jump operators on the joint space, already scaled by sqrt(gamma).
std::vector<Operator> lindblad_ops(const NoiseModel& m, const FockConfig& cfg);

enum class GeneratorKind { PSigmaX, XSigmaY, Free };

struct Segment {
    GeneratorKind generator;
    int sign;
    double duration;
};

struct SegmentPlan {
    std::vector<Segment> segments;
    double total_duration() const;
};

/// 2N alternating segments with durations |u_k|, |v_k| and the parameter
/// signs; zero-duration segments are dropped.
SegmentPlan schedule_to_segments(const InteractionSchedule& s);

/// Piecewise-constant-Hamiltonian RK4 integration of the master equation.
/// Per segment the Hamiltonian is -sign*generator applied for the segment
/// duration, so the gamma=0 limit reproduces the unitary gates exp(+i u A).
/// dt is an upper bound on the step: each segment gets at least 50 steps, a
/// step of at most 1e-2, and for stiff dissipators the base step is lowered
/// to the RK4 stability bound of the noise generator (boson dephasing decays
/// its farthest coherence at 2*gamma*cutoff^2, far beyond any accuracy
/// scale). A configuration whose stable step falls more than 64x below dt
/// raises IntegratorDiverged immediately; passing a smaller dt opts into
/// such long runs. Trace drift beyond 1e-6 still triggers dt halving (up to
/// 6 times) as a backstop.
JointDensity evolve_master(const JointDensity& rho0, const SegmentPlan& plan,
                           const NoiseModel& m, const FockConfig& cfg, double dt);

/// Full noisy protocol from |0><0| x |vac><vac|.
ProtocolResult run_noisy_protocol(const InteractionSchedule& s, const NoiseModel& m,
                                  const FockConfig& cfg, double dt = 1e-2);

}  // namespace rabi
