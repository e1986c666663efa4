#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "geosplit/ingest.hpp"
#include "geosplit/split_assignment.hpp"

namespace geosplit {

struct Percentile {
  double p = 0.0;
  double distance = 0.0;
  friend bool operator==(const Percentile&, const Percentile&) = default;
};

/// Overlap of one evaluation set with the train set. Samples on maps with no
/// train sample are excluded from the denominator and tallied in no_train_map.
struct SetLeakage {
  SetLabel set = SetLabel::val;
  std::size_t total = 0;
  std::size_t evaluated = 0;
  std::size_t no_train_map = 0;
  std::vector<std::size_t> within;             // per threshold, d < threshold
  std::vector<std::optional<double>> ratios;   // none when evaluated == 0
  std::vector<Percentile> percentiles;         // empty when evaluated == 0

  friend bool operator==(const SetLeakage&, const SetLeakage&) = default;
};

struct LeakageSection {
  SetLeakage val;
  SetLeakage test;
  friend bool operator==(const LeakageSection&, const LeakageSection&) = default;
};

struct LeakageReport {
  std::vector<double> thresholds;
  LeakageSection all;
  /// Present when the dataset mixes keyframe and non-keyframe samples; keyframe
  /// eval samples against keyframe train samples.
  std::optional<LeakageSection> keyframes;

  friend bool operator==(const LeakageReport&, const LeakageReport&) = default;
};

inline constexpr double kReportedPercentiles[] = {5.0, 25.0, 50.0, 75.0, 95.0};

/// Nearest-train distance for every val/test sample (nullopt for train and
/// unassigned samples and for samples on maps without train samples). Throws
/// no-train if the split has no train sample at all.
std::vector<std::optional<double>> nearest_train_distances(const Dataset& ds, std::span<const SetLabel> labels,
                                                           bool keyframes_only = false);

/// Ratio of val/test samples whose nearest train sample is strictly closer than
/// each threshold. Thresholds must be ascending and positive.
LeakageReport audit(const Dataset& ds, const SplitAssignment& split, std::span<const double> thresholds);

/// Val/test samples with nearest-train distance < buffer become unassigned.
SplitAssignment buffer_filter(const Dataset& ds, const SplitAssignment& split, double buffer = 60.0);

struct CurvePoint {
  double threshold = 0.0;
  std::optional<double> val_ratio;
  std::optional<double> test_ratio;
  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

/// Thresholds step, 2*step, ..., up to max_range from a single distance pass.
std::vector<CurvePoint> distance_curve(const Dataset& ds, const SplitAssignment& split, double max_range, double step);

}  // namespace geosplit
