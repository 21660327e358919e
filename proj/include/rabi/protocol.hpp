#pragma once

#include <optional>
#include <vector>

#include "rabi/gates.hpp"
#include "rabi/metrics.hpp"

namespace rabi {

/// The 2N interaction strengths, plus the lattice scale L when the schedule
/// came from the analytic family.
struct InteractionSchedule {
    int N = 0;
    std::optional<double> L;
    std::vector<double> u, v;

    void validate() const;
    double total_duration() const;
};

/// u_1 = 2^{N-1} sqrt(2) L, u_k = -2^{N-k} sqrt(2) L (k>1);
/// v_k = 2^{-(N-k)} pi/(4 sqrt(2) L) (k<N), v_N = -pi/(4 sqrt(2) L).
InteractionSchedule analytic_schedule(int N, double L);

/// Protocol output: the joint state plus both measurement conventions of
/// the oscillator (qubit traced out, and qubit projected onto |0>).
struct ProtocolResult {
    std::variant<JointState, JointDensity> joint;
    OscillatorState deterministic_osc;
    OscillatorState postselected_osc;
    double postselect_prob = 1.0;
};

/// Applies V_N U_N ... V_1 U_1 to |0>|vac>.
ProtocolResult run_unitary(const InteractionSchedule& s, const GateSet& gates);
ProtocolResult run_unitary(const InteractionSchedule& s, const FockConfig& cfg);

/// Counts local maxima of the X-density of the deterministic output.
/// Requires the well-separated regime 2^N L >= 6.
int peak_count_check(const InteractionSchedule& s, const FockConfig& cfg);

}  // namespace rabi
