#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "geosplit/leakage.hpp"
#include "geosplit/mapeval.hpp"
#include "geosplit/raster.hpp"
#include "geosplit/spatial.hpp"
#include "geosplit/split.hpp"

namespace geosplit {

using nlohmann::json;

/// Sorted keys, two-space indent, trailing newline. Numbers use the shortest
/// round-trip representation.
std::string canonical_dump(const json& j);

void to_json(json& j, const SetLeakage& v);
void from_json(const json& j, SetLeakage& v);
void to_json(json& j, const LeakageReport& v);
void from_json(const json& j, LeakageReport& v);
void to_json(json& j, const CurvePoint& v);
void from_json(const json& j, CurvePoint& v);

void to_json(json& j, const CellHistogram& v);
void from_json(const json& j, CellHistogram& v);
void to_json(json& j, const Heatmap& v);
void from_json(const json& j, Heatmap& v);

void to_json(json& j, const BalanceReport& v);
void from_json(const json& j, BalanceReport& v);
void to_json(json& j, const CutReport& v);
void from_json(const json& j, CutReport& v);
void to_json(json& j, const ValidationReport& v);

void to_json(json& j, const EvalReport& v);
void from_json(const json& j, EvalReport& v);
void to_json(json& j, const IouReport& v);

json folds_report_json(const std::vector<FoldResult>& folds);

}  // namespace geosplit
