#pragma once

// Generators and reference implementations shared by the unit and acceptance
// tests. The references are deliberately naive and share no code with the
// library beyond the data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "geosplit/ingest.hpp"
#include "geosplit/regions.hpp"
#include "geosplit/split_assignment.hpp"

namespace testsupport {

namespace fs = std::filesystem;
using geosplit::Dataset;
using geosplit::ElementClass;
using geosplit::FrameElements;
using geosplit::MapElement;
using geosplit::Point2;
using geosplit::Sample;
using geosplit::SetLabel;
using geosplit::SplitAssignment;

class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = fs::temp_directory_path() / ("geosplit_test_" + std::to_string(rng()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline Sample sample(std::string id, std::string seq, std::string map, double x, double y, std::int64_t t,
                     bool keyframe = true, std::map<std::string, std::string> attrs = {}) {
  Sample s;
  s.id = std::move(id);
  s.sequence_id = std::move(seq);
  s.map_id = std::move(map);
  s.x = x;
  s.y = y;
  s.t = t;
  s.keyframe = keyframe;
  s.attrs = std::move(attrs);
  return s;
}

/// Random drives: sequences are short random walks, clustered so that
/// neighbouring sequences overlap.
inline Dataset random_dataset(std::mt19937_64& rng, std::size_t n, std::size_t maps, double extent = 2000.0,
                              bool with_attrs = false) {
  std::uniform_real_distribution<double> pos(-extent / 2, extent / 2);
  std::uniform_real_distribution<double> step(-8.0, 8.0);
  std::uniform_int_distribution<std::size_t> len(1, 40);
  std::uniform_int_distribution<int> coin(0, 3);
  const char* weather[] = {"sun", "rain", "night"};
  std::vector<Sample> out;
  std::size_t seq = 0;
  while (out.size() < n) {
    const std::string map = "m" + std::to_string(rng() % maps);
    const std::string sid = "s" + std::to_string(seq++);
    double x = pos(rng), y = pos(rng);
    const std::size_t k = std::min(len(rng), n - out.size());
    const std::string w = weather[rng() % 3];
    for (std::size_t i = 0; i < k; ++i) {
      std::map<std::string, std::string> attrs;
      if (with_attrs) attrs["weather"] = w;
      out.push_back(sample(sid + "_" + std::to_string(i), sid, map, x, y, static_cast<std::int64_t>(i) * 500000,
                           coin(rng) != 0, attrs));
      x += step(rng);
      y += step(rng);
    }
  }
  return Dataset(std::move(out));
}

inline std::vector<SetLabel> random_labels(std::mt19937_64& rng, std::size_t n, bool with_unassigned = false) {
  std::vector<SetLabel> labels(n);
  for (auto& l : labels) {
    const auto r = rng() % 100;
    l = r < 60 ? SetLabel::train : r < 78 ? SetLabel::val : r < (with_unassigned ? 94u : 100u) ? SetLabel::test
                                                                                               : SetLabel::unassigned;
  }
  return labels;
}

/// One random label per sequence, same proportions as random_labels.
inline std::vector<SetLabel> random_sequence_labels(std::mt19937_64& rng, const Dataset& ds) {
  std::vector<SetLabel> labels(ds.size());
  for (const auto& [seq, idx] : ds.sequences()) {
    const SetLabel l = random_labels(rng, 1)[0];
    for (auto i : idx) labels[i] = l;
  }
  return labels;
}

/// Brute-force nearest distance among `candidates` on the same map.
inline std::optional<double> brute_nearest(const Dataset& ds, const std::vector<std::size_t>& candidates,
                                           const std::string& map, double x, double y) {
  std::optional<double> best;
  for (std::size_t c : candidates) {
    if (ds[c].map_id != map) continue;
    const double dx = ds[c].x - x, dy = ds[c].y - y;
    const double d = std::sqrt(dx * dx + dy * dy);
    if (!best || d < *best) best = d;
  }
  return best;
}

struct Planted {
  Dataset ds;
  SplitAssignment split;
  std::size_t val_total = 0;
  std::size_t val_near = 0;
};

/// Train poses on a 100 m lattice; `near` val poses sit 1-4 m from a train pose,
/// the rest at lattice-cell centres pushed >= 50 m away from every train pose
/// (on a far strip). A mirror test set gets `test_near` near poses.
inline Planted planted_leakage(std::size_t val_total, std::size_t near, std::size_t test_total,
                               std::size_t test_near, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> off(1.0, 4.0);
  std::uniform_real_distribution<double> ang(0.0, 6.283185307179586);
  std::vector<Sample> s;
  std::vector<SetLabel> labels;
  const int side = 40;
  for (int i = 0; i < side; ++i) {
    for (int j = 0; j < side; ++j) {
      s.push_back(sample("tr_" + std::to_string(i) + "_" + std::to_string(j), "trseq" + std::to_string(i), "city",
                         i * 100.0, j * 100.0, j));
      labels.push_back(SetLabel::train);
    }
  }
  auto plant = [&](const std::string& prefix, std::size_t total, std::size_t k, SetLabel label) {
    for (std::size_t n = 0; n < total; ++n) {
      double x, y;
      if (n < k) {
        const double a = ang(rng), r = off(rng);
        x = static_cast<double>(rng() % side) * 100.0 + r * std::cos(a);
        y = static_cast<double>(rng() % side) * 100.0 + r * std::sin(a);
      } else {
        // Far strip: at least 100 m beyond the lattice edge.
        x = -100.0 - static_cast<double>(rng() % 2000);
        y = static_cast<double>(rng() % 4000);
      }
      s.push_back(sample(prefix + std::to_string(n), prefix + "seq" + std::to_string(n), "city", x, y, 0));
      labels.push_back(label);
    }
  };
  plant("va_", val_total, near, SetLabel::val);
  plant("te_", test_total, test_near, SetLabel::test);
  Planted p;
  p.ds = Dataset(std::move(s));
  p.split = SplitAssignment::from_labels(p.ds, labels, "planted");
  p.val_total = val_total;
  p.val_near = near;
  return p;
}

/// Random simple polygon: a star-shaped polygon with sorted angles.
inline std::vector<Point2> random_star(std::mt19937_64& rng, double cx, double cy, double rmin, double rmax,
                                       std::size_t n) {
  std::uniform_real_distribution<double> r(rmin, rmax);
  std::vector<double> angles(n);
  for (std::size_t k = 0; k < n; ++k) angles[k] = 6.283185307179586 * (static_cast<double>(k) + 0.5) / n;
  std::vector<Point2> poly;
  for (double a : angles) {
    const double rr = r(rng);
    poly.push_back({cx + rr * std::cos(a), cy + rr * std::sin(a)});
  }
  return poly;
}

// ---- map-evaluation references ----

/// Points every `step` of arc length from the start, plus the final vertex.
inline std::vector<Point2> ref_resample(const std::vector<Point2>& line, double step) {
  std::vector<double> cum{0.0};
  for (std::size_t k = 1; k < line.size(); ++k) {
    cum.push_back(cum.back() + std::hypot(line[k].x - line[k - 1].x, line[k].y - line[k - 1].y));
  }
  std::vector<Point2> out;
  for (std::size_t m = 0;; ++m) {
    const double s = static_cast<double>(m) * step;
    if (m > 0 && !(s < cum.back())) break;
    std::size_t seg = 1;
    while (seg + 1 < line.size() && !(s < cum[seg])) ++seg;
    const double len = cum[seg] - cum[seg - 1];
    const double f = len > 0 ? (s - cum[seg - 1]) / len : 0.0;
    out.push_back({line[seg - 1].x + f * (line[seg].x - line[seg - 1].x),
                   line[seg - 1].y + f * (line[seg].y - line[seg - 1].y)});
    if (m == 0) out.back() = line.front();
  }
  if (!(out.back().x == line.back().x && out.back().y == line.back().y)) out.push_back(line.back());
  return out;
}

inline double ref_chamfer(const std::vector<Point2>& a0, const std::vector<Point2>& b0, double step = 0.5) {
  const auto a = ref_resample(a0, step);
  const auto b = ref_resample(b0, step);
  double ab = 0.0, ba = 0.0;
  for (const auto& p : a) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& q : b) m = std::min(m, std::hypot(p.x - q.x, p.y - q.y));
    ab += m;
  }
  for (const auto& q : b) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& p : a) m = std::min(m, std::hypot(p.x - q.x, p.y - q.y));
    ba += m;
  }
  return 0.5 * (ab / a.size() + ba / b.size());
}

/// Reference AP: rank by (-confidence, frame, index); each prediction looks at
/// every unmatched GT of its frame and class, keeps the closest (lowest index on
/// ties), and is a hit when closer than tau. AP is the sum over recall steps of
/// the best precision at any later rank, computed by brute force.
inline std::optional<double> ref_ap(const FrameElements& preds, const FrameElements& gts, ElementClass cls,
                                    double tau, double step = 0.5) {
  struct P {
    double conf;
    std::string frame;
    std::size_t idx;
  };
  std::vector<P> ranked;
  for (const auto& [f, es] : preds) {
    for (std::size_t i = 0; i < es.size(); ++i) {
      if (es[i].cls == cls) ranked.push_back({*es[i].confidence, f, i});
    }
  }
  std::sort(ranked.begin(), ranked.end(), [](const P& a, const P& b) {
    if (a.conf != b.conf) return a.conf > b.conf;
    if (a.frame != b.frame) return a.frame < b.frame;
    return a.idx < b.idx;
  });
  std::size_t total_gt = 0;
  std::map<std::string, std::vector<bool>> used;
  for (const auto& [f, es] : gts) {
    for (const auto& e : es) total_gt += e.cls == cls;
    used[f].assign(es.size(), false);
  }
  if (total_gt == 0) return std::nullopt;
  std::vector<int> hit;
  for (const P& p : ranked) {
    const auto& pe = preds.at(p.frame)[p.idx];
    auto it = gts.find(p.frame);
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    bool found = false;
    if (it != gts.end()) {
      for (std::size_t g = 0; g < it->second.size(); ++g) {
        if (it->second[g].cls != cls || used[p.frame][g]) continue;
        const double d = ref_chamfer(pe.points, it->second[g].points, step);
        if (d < best) {
          best = d;
          arg = g;
          found = true;
        }
      }
    }
    const bool tp = found && best < tau;
    if (tp) used[p.frame][arg] = true;
    hit.push_back(tp ? 1 : 0);
  }
  const std::size_t n = hit.size();
  double ap = 0.0;
  int tp_so_far = 0;
  for (std::size_t k = 0; k < n; ++k) {
    tp_so_far += hit[k];
    if (!hit[k]) continue;
    // interpolated precision: max precision over ranks >= k
    double best_p = 0.0;
    int tps = tp_so_far;
    for (std::size_t j = k; j < n; ++j) {
      if (j > k) tps += hit[j];
      best_p = std::max(best_p, static_cast<double>(tps) / static_cast<double>(j + 1));
    }
    ap += best_p * (1.0 / static_cast<double>(total_gt));
  }
  return ap;
}

inline std::vector<Point2> random_polyline(std::mt19937_64& rng, std::size_t max_points, double extent) {
  std::uniform_real_distribution<double> pos(-extent, extent);
  std::uniform_real_distribution<double> step(-2.0, 2.0);
  const std::size_t k = 2 + rng() % (max_points - 1);
  std::vector<Point2> pts{{pos(rng), pos(rng)}};
  while (pts.size() < k) {
    Point2 p{pts.back().x + step(rng), pts.back().y + step(rng)};
    if (p.x == pts.back().x && p.y == pts.back().y) continue;
    pts.push_back(p);
  }
  return pts;
}

/// A micro-instance: <= max_preds predictions and <= max_gts GT polylines of
/// random classes spread over up to two frames. Predictions are noisy copies of
/// GTs or random lines.
inline std::pair<FrameElements, FrameElements> micro_instance(std::mt19937_64& rng, std::size_t max_preds = 5,
                                                              std::size_t max_gts = 4, std::size_t max_pts = 6) {
  FrameElements preds, gts;
  std::uniform_real_distribution<double> noise(-0.8, 0.8);
  std::uniform_real_distribution<double> conf(0.0, 1.0);
  const std::size_t frames = 1 + rng() % 2;
  std::vector<MapElement> all_gt;
  const std::size_t ng = rng() % (max_gts + 1);
  for (std::size_t g = 0; g < ng; ++g) {
    MapElement e;
    e.frame_id = "f" + std::to_string(rng() % frames);
    e.cls = static_cast<ElementClass>(rng() % 2);  // two classes keep collisions likely
    e.points = random_polyline(rng, max_pts, 4.0);
    gts[e.frame_id].push_back(e);
    all_gt.push_back(e);
  }
  const std::size_t np = rng() % (max_preds + 1);
  for (std::size_t p = 0; p < np; ++p) {
    MapElement e;
    if (!all_gt.empty() && rng() % 3 != 0) {
      e = all_gt[rng() % all_gt.size()];
      for (auto& pt : e.points) {
        pt.x += noise(rng);
        pt.y += noise(rng);
      }
    } else {
      e.frame_id = "f" + std::to_string(rng() % frames);
      e.cls = static_cast<ElementClass>(rng() % 2);
      e.points = random_polyline(rng, max_pts, 4.0);
    }
    // Coarse confidences make ties common.
    e.confidence = std::round(conf(rng) * 4.0) / 4.0;
    preds[e.frame_id].push_back(e);
  }
  return {preds, gts};
}

}  // namespace testsupport
