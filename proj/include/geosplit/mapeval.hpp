#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geosplit/geometry.hpp"
#include "geosplit/ingest.hpp"

namespace geosplit {

inline constexpr double kDefaultResampleInterval = 0.5;
inline constexpr double kDefaultThresholds[] = {0.5, 1.0, 1.5};

/// Points at arc length 0, interval, 2*interval, ... along the polyline, plus
/// the final vertex.
std::vector<Point2> resample_polyline(std::span<const Point2> line, double interval = kDefaultResampleInterval);

/// Symmetric Chamfer distance between two polylines after arc-length
/// resampling: half the sum of both directed mean nearest-point distances.
double chamfer(std::span<const Point2> a, std::span<const Point2> b, double interval = kDefaultResampleInterval);

struct Match {
  std::string frame_id;
  std::size_t prediction = 0;       // index within the frame's element list
  std::optional<std::size_t> gt;    // index within the frame's element list; none for FP
  double distance = 0.0;            // to the nearest unmatched GT at match time (inf if none)
  double confidence = 0.0;
  bool true_positive = false;

  friend bool operator==(const Match&, const Match&) = default;
};

/// Greedy matching for one class at one threshold, predictions in ranking order.
struct MatchResult {
  ElementClass cls = ElementClass::divider;
  double threshold = 0.0;
  std::vector<Match> matches;
  std::size_t gt_count = 0;
};

/// Predictions are ranked by descending confidence (ties: frame order, then
/// position within the frame). Each takes the unmatched same-frame GT of its
/// class with the smallest Chamfer distance and is a true positive iff that
/// distance is below `threshold`; only true positives consume a GT.
/// Throws missing-confidence.
MatchResult match_predictions(const FrameElements& preds, const FrameElements& gts, ElementClass cls,
                              double threshold, double interval = kDefaultResampleInterval);

/// Area under the precision/recall curve with precision made non-increasing
/// from the right. none when there is no ground truth.
std::optional<double> average_precision(const MatchResult& m);

std::optional<double> ap_at_threshold(const FrameElements& preds, const FrameElements& gts, ElementClass cls,
                                      double threshold, double interval = kDefaultResampleInterval);

struct ClassEval {
  ElementClass cls = ElementClass::divider;
  std::vector<std::optional<double>> ap;  // per threshold
  std::optional<double> map;              // mean of ap; none when the class has no GT
  std::size_t gt_count = 0;
  std::size_t pred_count = 0;

  friend bool operator==(const ClassEval&, const ClassEval&) = default;
};

struct EvalReport {
  std::vector<double> thresholds;
  double resample_interval = kDefaultResampleInterval;
  std::vector<ClassEval> classes;         // divider, boundary, crossing
  std::optional<double> mean;             // over classes with GT
  std::vector<std::string> excluded;      // classes without GT
  std::size_t frames = 0;
  std::size_t gt_elements = 0;
  std::size_t pred_elements = 0;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

EvalReport evaluate(const FrameElements& preds, const FrameElements& gts,
                    std::span<const double> thresholds = kDefaultThresholds,
                    double interval = kDefaultResampleInterval);

}  // namespace geosplit
