#pragma once

// JSON and CSV forms of plans, reports and sample sets.
//
// Numbers use the shortest representation that round-trips and always a '.'
// decimal separator, independent of the process locale.

#include <iosfwd>
#include <span>
#include <string>

#include <json.hpp>

#include "mlmc/diagnostics.hpp"
#include "mlmc/limit_law.hpp"
#include "mlmc/mlmc.hpp"

namespace mlmc {

/// Shortest round-trip decimal form of `value` ("nan"/"inf" when not finite).
std::string format_number(double value);

nlohmann::ordered_json to_json(const MlmcPlan& plan);
nlohmann::ordered_json to_json(const LevelStats& stats);
nlohmann::ordered_json to_json(const ConfidenceInterval& ci);
nlohmann::ordered_json to_json(const EstimateReport& report);
nlohmann::ordered_json to_json(const LimitVariance& result);
nlohmann::ordered_json to_json(const BerryEsseenReport& report);
nlohmann::ordered_json to_json(const BracketCheck& check);
/// Summary fields only; the standardized errors go to CSV.
nlohmann::ordered_json to_json(const CltExperiment& experiment);

MlmcPlan plan_from_json(const nlohmann::ordered_json& j);
EstimateReport report_from_json(const nlohmann::ordered_json& j);

/// Header plus one row per level:
/// level,count,mean,variance,third_abs_moment,cost
void write_level_stats_csv(std::ostream& out,
                           std::span<const LevelStats> stats);

/// Header `column` plus one value per row.
void write_column_csv(std::ostream& out, const std::string& column,
                      std::span<const double> values);

}  // namespace mlmc
