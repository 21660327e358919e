#pragma once

#include <string>

#include "rabi/hilbert.hpp"

namespace rabi {

/// Uniform quadrature-density grid; values integrate to 1 (trapezoid).
struct QuadratureGrid {
    double p_min = 0.0;
    double p_max = 0.0;
    int n_points = 0;
    RealVector values;

    double spacing() const { return (p_max - p_min) / (n_points - 1); }
    double point(int i) const { return p_min + i * spacing(); }
    double trapezoid() const;
};

/// One row of figures of merit for a protocol output.
struct MetricsRecord {
    double squeeze_db = 0.0;
    double antisqueeze_db = 0.0;
    double mean_x = 0.0;
    double mean_p = 0.0;
    double fidelity = 0.0;
    double fisher = 0.0;
    double fisher_equiv_db = 0.0;
    double postselect_prob = 1.0;
};

struct Moments {
    double mean_x, mean_p, var_x, var_p;
};

/// First and central second moments of X and P.
Moments moments(const OscillatorState& s);

/// (squeeze_db, antisqueeze_db) = (-10 log10(2 var_p), -10 log10(2 var_x)).
std::pair<double, double> squeezing_db(const OscillatorState& s);

/// <psi_t| rho |psi_t> against a pure target.
double fidelity(const OscillatorState& s, const OscillatorState& target);

/// Momentum-quadrature probability density on a uniform grid.
QuadratureGrid p_density(const OscillatorState& s, double p_min, double p_max,
                         int n_points);

/// Position-quadrature probability density (same machinery, no momentum
/// phase factor).
QuadratureGrid x_density(const OscillatorState& s, double x_min, double x_max,
                         int n_points);

/// Momentum density on a grid sized from the state itself: centered on
/// <P>, half-width max(9, 8 sqrt(var_p)), and at least 40 points per
/// standard deviation (n_points acts as a floor, capped at 20001). A fixed
/// point count starves strongly squeezed peaks of resolution, while var_p
/// alone understates the support of fringe-squeezed superpositions.
QuadratureGrid p_density_auto(const OscillatorState& s, int n_points = 1601);

/// Classical Fisher information of the density with respect to displacement,
/// I_C = 2 int (dq/dp)^2 / q dp, with an internal half-resolution stability
/// check (<0.5% shift required).
double fisher_information(const QuadratureGrid& grid);

/// 10 log10(fisher/4): squeezing of the Gaussian state with the same I_C.
double gaussian_equiv_db(double fisher);

/// Best fidelity against pure squeezed vacuum, maximized over the target
/// level in [0, 20] dB by golden-section search (1e-4 dB resolution).
std::pair<double, double> best_fit_squeezed_fidelity(const OscillatorState& s);

/// Tridiagonal quadrature applications (no operator materialization).
Vector apply_x(const Vector& v);
Vector apply_p(const Vector& v);

}  // namespace rabi
