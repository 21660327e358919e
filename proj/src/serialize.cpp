#include "rabi/serialize.hpp"

#include <cstdio>

#include "json.hpp"

namespace rabi {

using nlohmann::json;

std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

namespace {

// Round through the printed form so JSON artifacts carry the same digits as
// the CSV ones.
double round9(double v) { return std::stod(fmt9(v)); }

json schedule_json(const InteractionSchedule& s, bool full_precision) {
    auto put = [&](double v) { return full_precision ? v : round9(v); };
    json u = json::array(), v = json::array();
    for (double x : s.u) u.push_back(put(x));
    for (double x : s.v) v.push_back(put(x));
    json j{{"N", s.N}, {"u", std::move(u)}, {"v", std::move(v)}};
    if (s.L)
        j["L"] = put(*s.L);
    else
        j["L"] = nullptr;
    return j;
}

}  // namespace

std::string schedule_to_json(const InteractionSchedule& s) {
    return schedule_json(s, true).dump();
}

InteractionSchedule schedule_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad schedule JSON: ") + e.what());
    }
    InteractionSchedule s;
    try {
        s.N = j.at("N").get<int>();
        if (!j.at("L").is_null()) s.L = j.at("L").get<double>();
        s.u = j.at("u").get<std::vector<double>>();
        s.v = j.at("v").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad schedule JSON: ") + e.what());
    }
    s.validate();
    return s;
}

std::string report_to_json(const OptimizeReport& rep) {
    json starts = json::array();
    for (const auto& st : rep.starts)
        starts.push_back({{"L", round9(st.L)},
                          {"objective", round9(st.objective)},
                          {"evaluations", st.evaluations}});
    const MetricsRecord& m = rep.metrics;
    json j{{"N", rep.best.N},
           {"seed", rep.seed},
           {"evaluations", rep.evaluations},
           {"budget_exhausted", rep.budget_exhausted},
           {"best", schedule_json(rep.best, false)},
           {"metrics",
            {{"squeeze_db", round9(m.squeeze_db)},
             {"antisqueeze_db", round9(m.antisqueeze_db)},
             {"mean_x", round9(m.mean_x)},
             {"mean_p", round9(m.mean_p)},
             {"fidelity", round9(m.fidelity)},
             {"fisher", round9(m.fisher)},
             {"fisher_equiv_db", round9(m.fisher_equiv_db)},
             {"postselect_prob", round9(m.postselect_prob)}}},
           {"starts", std::move(starts)}};
    return j.dump(2);
}

std::string metrics_csv_header() {
    return "N,squeeze_db,antisqueeze_db,fidelity,fisher,fisher_equiv_db,"
           "postselect_prob,noise_type,gamma_T,postselected";
}

std::string metrics_csv_row(const MetricsRecord& m, int N, const NoiseModel& noise,
                            bool postselected) {
    std::string row = std::to_string(N);
    for (double v : {m.squeeze_db, m.antisqueeze_db, m.fidelity, m.fisher,
                     m.fisher_equiv_db, m.postselect_prob})
        row += "," + fmt9(v);
    row += "," + to_string(noise.kind);
    row += "," + fmt9(noise.gamma_T);
    row += postselected ? ",1" : ",0";
    return row;
}

}  // namespace rabi
