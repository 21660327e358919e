#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "rabi/optimizer.hpp"

using namespace rabi;

namespace {

const FockConfig kCfg{120, 1e-7};

InteractionSchedule zero_schedule() {
    InteractionSchedule s;
    s.N = 1;
    s.u = {0.0};
    s.v = {0.0};
    return s;
}

}  // namespace

TEST_CASE("zero schedule leaves vacuum: objective is the vacuum variance") {
    Objective obj;
    CHECK(objective_value(zero_schedule(), obj, kCfg) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("w=0 weighted objective equals the squeeze-only objective exactly") {
    auto s = analytic_schedule(2, 0.4);
    Objective squeeze{0.0, false, ObjectiveTarget::SqueezeOnly};
    Objective weighted{0.0, false, ObjectiveTarget::Weighted};
    CHECK(objective_value(s, squeeze, kCfg) == objective_value(s, weighted, kCfg));
}

TEST_CASE("w=1 on a minimum-uncertainty state gives the uncertainty product 1/4") {
    Objective obj{1.0, false, ObjectiveTarget::Weighted};
    CHECK(objective_value(zero_schedule(), obj, kCfg) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("objective weight outside [0,1] is rejected") {
    Objective obj{1.5, false, ObjectiveTarget::Weighted};
    CHECK_THROWS_AS(objective_value(zero_schedule(), obj, kCfg), ConfigError);
    CHECK_THROWS_AS(optimize(1, obj, 7, kCfg), ConfigError);
}

TEST_CASE("optimize rejects bad N and bad budget") {
    Objective obj;
    CHECK_THROWS_AS(optimize(0, obj, 7, kCfg), ConfigError);
    CHECK_THROWS_AS(optimize(7, obj, 7, kCfg), ConfigError);
    CHECK_THROWS_AS(optimize(1, obj, 7, kCfg, 500), ConfigError);
}

TEST_CASE("single-step squeeze-only optimization") {
    Objective obj;
    auto rep = optimize(1, obj, 7, kCfg);

    CHECK(rep.starts.size() == 27);
    CHECK(rep.seed == 7);
    // One step of the protocol buys ~2 dB deterministically (the 3-4 dB per
    // step seen on the multi-step curve includes the later steps /
    // postselection).
    CHECK(rep.metrics.squeeze_db > 1.5);
    CHECK(rep.metrics.squeeze_db < 4.7);
    CHECK(std::abs(rep.metrics.mean_p) < 1e-6);

    double best_f = objective_value(rep.best, obj, kCfg);
    for (const auto& st : rep.starts) CHECK(best_f <= st.objective + 1e-12);

    // Never worse than the best unperturbed analytic seed over the L grid.
    double best_analytic = 1e300;
    for (int i = 0; i < 9; ++i) {
        double L = 0.30 + 0.05 * i;
        best_analytic =
            std::min(best_analytic, objective_value(analytic_schedule(1, L), obj, kCfg));
    }
    CHECK(best_f <= best_analytic + 1e-12);
}

TEST_CASE("optimization is deterministic for a fixed seed") {
    Objective obj;
    auto a = optimize(1, obj, 42, kCfg, 4000);
    auto b = optimize(1, obj, 42, kCfg, 4000);
    CHECK(a.evaluations == b.evaluations);
    REQUIRE(a.best.u.size() == b.best.u.size());
    for (size_t i = 0; i < a.best.u.size(); ++i) {
        CHECK(a.best.u[i] == b.best.u[i]);
        CHECK(a.best.v[i] == b.best.v[i]);
    }
    CHECK(a.metrics.squeeze_db == b.metrics.squeeze_db);
}

TEST_CASE("postselected objective keeps the branch probability above a half") {
    Objective obj{0.0, true, ObjectiveTarget::SqueezeOnly};
    auto rep = optimize(1, obj, 7, kCfg, 4000);
    CHECK(rep.metrics.postselect_prob >= 0.5);
    CHECK(rep.metrics.squeeze_db > 2.5);
}

TEST_CASE("weight sweep trades excess anti-squeezing against squeezing") {
    // w=1 is excluded: there the objective degenerates to the uncertainty
    // product, whose global optimum is the vacuum.
    auto rows = w_sweep(1, {0.0, 0.5}, 7, kCfg, 4000);
    REQUIRE(rows.size() == 2);

    Objective squeeze_only;
    auto ref = optimize(1, squeeze_only, 7, kCfg, 4000);
    CHECK(rows[0].squeeze_db == ref.metrics.squeeze_db);
    CHECK(rows[0].antisqueeze_db == ref.metrics.antisqueeze_db);

    auto excess = [](const WSweepRow& r) { return std::abs(r.antisqueeze_db) - r.squeeze_db; };
    CHECK(excess(rows[1]) <= excess(rows[0]) + 0.2);
    CHECK(rows[1].squeeze_db >= rows[0].squeeze_db - 1.0);
}
