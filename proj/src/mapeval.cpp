#include "geosplit/mapeval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "geosplit/error.hpp"

namespace geosplit {

std::vector<Point2> resample_polyline(std::span<const Point2> line, double interval) {
  if (!(interval > 0.0)) throw Error(ErrorKind::invalid_argument, "resample interval must be positive");
  if (line.size() < 2) throw Error(ErrorKind::degenerate_polyline, "polyline needs at least 2 points");
  std::vector<Point2> out{line.front()};
  double next = interval;  // arc length of the next sample
  double walked = 0.0;     // arc length at the start of the current segment
  for (std::size_t k = 1; k < line.size(); ++k) {
    const Point2& a = line[k - 1];
    const Point2& b = line[k];
    const double len = planar_distance(a, b);
    while (next < walked + len) {
      const double f = (next - walked) / len;
      out.push_back({a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)});
      next += interval;
    }
    walked += len;
  }
  if (!(out.back() == line.back())) out.push_back(line.back());
  return out;
}

namespace {

double directed_mean(std::span<const Point2> from, std::span<const Point2> to) {
  double sum = 0.0;
  for (const auto& p : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : to) best = std::min(best, planar_distance(p, q));
    sum += best;
  }
  return sum / static_cast<double>(from.size());
}

using Resampled = std::vector<std::vector<Point2>>;

// Per frame, the resampled geometry of one class, with original indices.
struct ClassFrame {
  std::vector<std::size_t> index;
  Resampled shapes;
};

ClassFrame collect(const std::vector<MapElement>& elements, ElementClass cls, double interval) {
  ClassFrame out;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (elements[i].cls != cls) continue;
    out.index.push_back(i);
    out.shapes.push_back(resample_polyline(elements[i].points, interval));
  }
  return out;
}

double chamfer_resampled(const std::vector<Point2>& a, const std::vector<Point2>& b) {
  return 0.5 * (directed_mean(a, b) + directed_mean(b, a));
}

struct Ranked {
  const std::string* frame;
  std::size_t local;      // index into the ClassFrame of predictions
  double confidence;
};

// Chamfer matrices for one class, shared across thresholds.
struct ClassDistances {
  std::map<std::string, std::vector<std::vector<double>>> by_frame;  // [pred][gt]
  std::map<std::string, ClassFrame> preds;
  std::map<std::string, ClassFrame> gts;
  std::vector<Ranked> ranking;
  std::size_t gt_count = 0;
};

ClassDistances prepare(const FrameElements& preds, const FrameElements& gts, ElementClass cls, double interval) {
  ClassDistances d;
  for (const auto& [frame, elements] : gts) {
    auto cf = collect(elements, cls, interval);
    d.gt_count += cf.index.size();
    d.gts.emplace(frame, std::move(cf));
  }
  for (const auto& [frame, elements] : preds) {
    for (const auto& e : elements) {
      if (e.cls == cls && !e.confidence) {
        throw Error(ErrorKind::missing_confidence, "prediction lacks a confidence", frame);
      }
    }
    auto pf = collect(elements, cls, interval);
    if (pf.index.empty()) continue;
    auto& matrix = d.by_frame[frame];
    auto g = d.gts.find(frame);
    for (std::size_t p = 0; p < pf.shapes.size(); ++p) {
      std::vector<double> row;
      if (g != d.gts.end()) {
        for (const auto& gs : g->second.shapes) row.push_back(chamfer_resampled(pf.shapes[p], gs));
      }
      matrix.push_back(std::move(row));
    }
    d.preds.emplace(frame, std::move(pf));
  }
  for (const auto& [frame, pf] : d.preds) {
    const auto& elements = preds.at(frame);
    for (std::size_t p = 0; p < pf.index.size(); ++p) {
      d.ranking.push_back({&frame, p, *elements[pf.index[p]].confidence});
    }
  }
  std::stable_sort(d.ranking.begin(), d.ranking.end(),
                   [](const Ranked& a, const Ranked& b) { return a.confidence > b.confidence; });
  return d;
}

MatchResult match(const ClassDistances& d, ElementClass cls, double threshold) {
  MatchResult out;
  out.cls = cls;
  out.threshold = threshold;
  out.gt_count = d.gt_count;
  std::map<std::string, std::vector<bool>> taken;
  for (const auto& [frame, gf] : d.gts) taken[frame].assign(gf.index.size(), false);
  for (const Ranked& r : d.ranking) {
    const auto& row = d.by_frame.at(*r.frame)[r.local];
    Match m;
    m.frame_id = *r.frame;
    m.prediction = d.preds.at(*r.frame).index[r.local];
    m.confidence = r.confidence;
    m.distance = std::numeric_limits<double>::infinity();
    std::optional<std::size_t> nearest;
    if (!row.empty()) {
      auto& used = taken.at(*r.frame);
      for (std::size_t g = 0; g < row.size(); ++g) {
        if (!used[g] && row[g] < m.distance) {
          m.distance = row[g];
          nearest = g;
        }
      }
      if (nearest && m.distance < threshold) {
        used[*nearest] = true;
        m.true_positive = true;
        m.gt = d.gts.at(*r.frame).index[*nearest];
      }
    }
    out.matches.push_back(std::move(m));
  }
  return out;
}

}  // namespace

double chamfer(std::span<const Point2> a, std::span<const Point2> b, double interval) {
  return chamfer_resampled(resample_polyline(a, interval), resample_polyline(b, interval));
}

MatchResult match_predictions(const FrameElements& preds, const FrameElements& gts, ElementClass cls,
                              double threshold, double interval) {
  return match(prepare(preds, gts, cls, interval), cls, threshold);
}

std::optional<double> average_precision(const MatchResult& m) {
  if (m.gt_count == 0) return std::nullopt;
  const std::size_t n = m.matches.size();
  std::vector<double> precision(n);
  std::size_t tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (m.matches[i].true_positive) ++tp;
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
  }
  for (std::size_t i = n; i-- > 1;) precision[i - 1] = std::max(precision[i - 1], precision[i]);
  // Recall rises by 1/gt_count exactly at each true positive.
  double area = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (m.matches[i].true_positive) area += precision[i];
  }
  return area / static_cast<double>(m.gt_count);
}

std::optional<double> ap_at_threshold(const FrameElements& preds, const FrameElements& gts, ElementClass cls,
                                      double threshold, double interval) {
  return average_precision(match_predictions(preds, gts, cls, threshold, interval));
}

EvalReport evaluate(const FrameElements& preds, const FrameElements& gts, std::span<const double> thresholds,
                    double interval) {
  if (thresholds.empty()) throw Error(ErrorKind::invalid_argument, "at least one threshold is required");
  for (double t : thresholds) {
    if (!(t > 0.0) || !std::isfinite(t)) throw Error(ErrorKind::invalid_argument, "thresholds must be positive");
  }
  EvalReport report;
  report.thresholds.assign(thresholds.begin(), thresholds.end());
  report.resample_interval = interval;
  std::map<std::string, bool> frames;
  for (const auto& [f, e] : gts) {
    frames[f] = true;
    report.gt_elements += e.size();
  }
  for (const auto& [f, e] : preds) {
    frames[f] = true;
    report.pred_elements += e.size();
  }
  report.frames = frames.size();

  double sum = 0.0;
  std::size_t included = 0;
  for (ElementClass cls : kElementClasses) {
    const ClassDistances d = prepare(preds, gts, cls, interval);
    ClassEval ce;
    ce.cls = cls;
    ce.gt_count = d.gt_count;
    ce.pred_count = d.ranking.size();
    double class_sum = 0.0;
    for (double t : thresholds) {
      const auto ap = average_precision(match(d, cls, t));
      ce.ap.push_back(ap);
      if (ap) class_sum += *ap;
    }
    if (d.gt_count > 0) {
      ce.map = class_sum / static_cast<double>(thresholds.size());
      sum += *ce.map;
      ++included;
    } else {
      report.excluded.emplace_back(to_string(cls));
    }
    report.classes.push_back(std::move(ce));
  }
  if (included > 0) report.mean = sum / static_cast<double>(included);
  return report;
}

}  // namespace geosplit
