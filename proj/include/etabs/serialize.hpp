#pragma once

#include "etabs/metric.hpp"
#include "etabs/tridiagonal.hpp"

#include "json.hpp"

namespace etabs {

/// {n, dx, x_min, diag[], upper[], lower[]}; doubles are written with
/// shortest round-trip digits, so loading reproduces every bit.
nlohmann::json to_json(const TridiagonalOperator& op);
TridiagonalOperator operator_from_json(const nlohmann::json& j);

/// {eta[], condition_number}
nlohmann::json to_json(const MetricOperator& m);
MetricOperator metric_from_json(const nlohmann::json& j);

}  // namespace etabs
