#pragma once

#include <vector>

#include "rabi/hilbert.hpp"

namespace rabi {

/// Superposition of coherent states on the half-integer lattice
/// alpha_s = d_alpha (s + 1/2), s in Z, under the Gaussian envelope
/// exp(-alpha_s^2 / (Delta^{-2} - 1)) with Delta = 10^{-delta_db/20}.
struct LatticeSpec {
    double d_alpha = 0.0;
    double delta_db = 0.0;
    double trunc_tol = 1e-10;

    void validate() const;
};

/// The normalized lattice state; terms whose envelope weight falls below
/// trunc_tol relative to the central one are dropped.
OscillatorState lattice_superposition(const LatticeSpec& spec, const FockConfig& cfg);

/// Fock cutoff that comfortably holds every retained lattice component.
int suggested_cutoff(const LatticeSpec& spec);

struct ApproxRow {
    double d_alpha = 0.0;
    double delta_db = 0.0;
    double squeeze_db = 0.0;
    double antisqueeze_db = 0.0;
    double fidelity = 0.0;
};

/// One row per (d_alpha, delta_db) pair, d_alpha-major order. Each row is
/// computed at max(cfg.cutoff, suggested_cutoff) so wide lattices are not
/// clipped by the caller's default window.
std::vector<ApproxRow> approx_scan(const std::vector<double>& d_alpha_grid,
                                   const std::vector<double>& delta_db_grid,
                                   const FockConfig& cfg);

}  // namespace rabi
