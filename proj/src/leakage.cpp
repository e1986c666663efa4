#include "geosplit/leakage.hpp"

#include <algorithm>
#include <cmath>

#include "geosplit/error.hpp"
#include "geosplit/parallel.hpp"
#include "geosplit/spatial.hpp"
#include "geosplit/text.hpp"

namespace geosplit {

namespace {

void check_thresholds(std::span<const double> thresholds) {
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > 0.0) || !std::isfinite(thresholds[i])) {
      throw Error(ErrorKind::invalid_argument, "thresholds must be positive and finite");
    }
    if (i > 0 && !(thresholds[i] > thresholds[i - 1])) {
      throw Error(ErrorKind::invalid_argument, "thresholds must be strictly ascending");
    }
  }
}

bool mixes_keyframes(const Dataset& ds) {
  bool any_key = false;
  bool any_other = false;
  for (const auto& s : ds.samples()) (s.keyframe ? any_key : any_other) = true;
  return any_key && any_other;
}

SetLeakage summarize(const Dataset& ds, std::span<const SetLabel> labels,
                     std::span<const std::optional<double>> distances, SetLabel set,
                     std::span<const double> thresholds, bool keyframes_only) {
  SetLeakage out;
  out.set = set;
  std::vector<double> d;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (labels[i] != set || (keyframes_only && !ds[i].keyframe)) continue;
    ++out.total;
    if (distances[i]) {
      d.push_back(*distances[i]);
    } else {
      ++out.no_train_map;
    }
  }
  out.evaluated = d.size();
  std::sort(d.begin(), d.end());
  for (double tau : thresholds) {
    const auto k = static_cast<std::size_t>(std::lower_bound(d.begin(), d.end(), tau) - d.begin());
    out.within.push_back(k);
    if (d.empty()) {
      out.ratios.emplace_back(std::nullopt);
    } else {
      out.ratios.emplace_back(static_cast<double>(k) / static_cast<double>(d.size()));
    }
  }
  if (!d.empty()) {
    for (double p : kReportedPercentiles) {
      // nearest rank
      auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(d.size())));
      rank = std::clamp<std::size_t>(rank, 1, d.size());
      out.percentiles.push_back({p, d[rank - 1]});
    }
  }
  return out;
}

}  // namespace

std::vector<std::optional<double>> nearest_train_distances(const Dataset& ds, std::span<const SetLabel> labels,
                                                           bool keyframes_only) {
  std::vector<std::size_t> train;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (labels[i] == SetLabel::train && (!keyframes_only || ds[i].keyframe)) train.push_back(i);
  }
  if (train.empty()) throw Error(ErrorKind::no_train, "leakage audits need at least one train sample");
  const SpatialIndex index(ds, train);
  std::vector<std::optional<double>> out(ds.size());
  parallel_for(ds.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      if (labels[i] != SetLabel::val && labels[i] != SetLabel::test) continue;
      if (keyframes_only && !ds[i].keyframe) continue;
      out[i] = index.nearest_distance(ds[i]);
    }
  });
  return out;
}

LeakageReport audit(const Dataset& ds, const SplitAssignment& split, std::span<const double> thresholds) {
  check_thresholds(thresholds);
  const auto labels = split.aligned(ds);
  LeakageReport report;
  report.thresholds.assign(thresholds.begin(), thresholds.end());
  const auto dist = nearest_train_distances(ds, labels);
  report.all.val = summarize(ds, labels, dist, SetLabel::val, thresholds, false);
  report.all.test = summarize(ds, labels, dist, SetLabel::test, thresholds, false);
  if (mixes_keyframes(ds)) {
    const bool has_train_key = std::any_of(ds.samples().begin(), ds.samples().end(), [&](const Sample& s) {
      return s.keyframe && labels[static_cast<std::size_t>(&s - ds.samples().data())] == SetLabel::train;
    });
    if (has_train_key) {
      const auto kdist = nearest_train_distances(ds, labels, true);
      LeakageSection k;
      k.val = summarize(ds, labels, kdist, SetLabel::val, thresholds, true);
      k.test = summarize(ds, labels, kdist, SetLabel::test, thresholds, true);
      report.keyframes = std::move(k);
    }
  }
  return report;
}

SplitAssignment buffer_filter(const Dataset& ds, const SplitAssignment& split, double buffer) {
  if (!(buffer > 0.0) || !std::isfinite(buffer)) {
    throw Error(ErrorKind::invalid_argument, "buffer must be positive");
  }
  auto labels = split.aligned(ds);
  const auto dist = nearest_train_distances(ds, labels);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (dist[i] && *dist[i] < buffer) labels[i] = SetLabel::unassigned;
  }
  std::string provenance = split.provenance();
  if (!provenance.empty()) provenance += "+";
  provenance += "buffer_filter(" + format_double(buffer) + ")";
  return SplitAssignment::from_labels(ds, labels, std::move(provenance));
}

std::vector<CurvePoint> distance_curve(const Dataset& ds, const SplitAssignment& split, double max_range,
                                       double step) {
  if (!(step > 0.0) || !std::isfinite(step) || !(max_range >= step) || !std::isfinite(max_range)) {
    throw Error(ErrorKind::invalid_argument, "distance curve needs step > 0 and max_range >= step");
  }
  const auto steps = static_cast<std::size_t>(std::floor(max_range / step + 1e-9));
  std::vector<double> thresholds;
  for (std::size_t k = 1; k <= steps; ++k) thresholds.push_back(static_cast<double>(k) * step);
  const auto labels = split.aligned(ds);
  const auto dist = nearest_train_distances(ds, labels);
  const auto val = summarize(ds, labels, dist, SetLabel::val, thresholds, false);
  const auto test = summarize(ds, labels, dist, SetLabel::test, thresholds, false);
  std::vector<CurvePoint> out;
  for (std::size_t k = 0; k < thresholds.size(); ++k) out.push_back({thresholds[k], val.ratios[k], test.ratios[k]});
  return out;
}

}  // namespace geosplit
