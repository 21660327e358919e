#pragma once

#include <vector>

#include "rabi/metrics.hpp"
#include "rabi/protocol.hpp"

namespace rabi {

enum class ObjectiveTarget { SqueezeOnly, Weighted };

/// What the search minimizes: var_p, or var_p^{1-w} (var_p var_x)^w, on the
/// deterministic or postselected branch.
struct Objective {
    double w = 0.0;
    bool postselected = false;
    ObjectiveTarget target = ObjectiveTarget::SqueezeOnly;

    void validate() const;
};

struct StartRecord {
    double L = 0.0;
    double objective = 0.0;
    long evaluations = 0;
};

struct OptimizeReport {
    InteractionSchedule best;
    MetricsRecord metrics;
    long evaluations = 0;
    std::vector<StartRecord> starts;
    unsigned long long seed = 0;
    bool budget_exhausted = false;
};

/// Objective for one schedule. Leak errors propagate; the optimizer maps
/// them to a flat penalty internally.
double objective_value(const InteractionSchedule& s, const Objective& obj,
                       const FockConfig& cfg);

/// Nelder-Mead multi-start over jittered analytic seeds, L in
/// {0.30, 0.35, ..., 0.70}, three restarts per L. Deterministic in
/// (N, obj, seed, budget, cfg). budget caps evaluations per start.
OptimizeReport optimize(int N, const Objective& obj, unsigned long long seed,
                        const FockConfig& cfg, long budget = 20000);

struct WSweepRow {
    double w = 0.0;
    double squeeze_db = 0.0;
    double antisqueeze_db = 0.0;
};

/// One weighted optimization per grid point.
std::vector<WSweepRow> w_sweep(int N, const std::vector<double>& w_grid,
                               unsigned long long seed, const FockConfig& cfg,
                               long budget = 20000);

}  // namespace rabi
