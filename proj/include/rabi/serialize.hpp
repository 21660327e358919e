#pragma once

#include <string>

#include "rabi/lindblad.hpp"
#include "rabi/optimizer.hpp"

namespace rabi {

/// Floating-point formatting used in every user-facing artifact.
std::string fmt9(double v);

/// Schedule round-trip at full precision (cache fidelity); throws
/// ConfigError on malformed input.
std::string schedule_to_json(const InteractionSchedule& s);
InteractionSchedule schedule_from_json(const std::string& text);

/// User-facing optimization report, floats at 9 significant digits.
std::string report_to_json(const OptimizeReport& rep);

/// MetricsRecord CSV schema shared by all sweep outputs.
std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsRecord& m, int N, const NoiseModel& noise,
                            bool postselected);

}  // namespace rabi
