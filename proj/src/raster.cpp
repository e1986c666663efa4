#include "geosplit/raster.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "geosplit/error.hpp"

namespace geosplit {

void RasterSpec::validate() const {
  const bool finite = std::isfinite(x_min) && std::isfinite(x_max) && std::isfinite(y_min) &&
                      std::isfinite(y_max) && std::isfinite(resolution) && std::isfinite(half_width);
  if (!finite || !(x_min < x_max) || !(y_min < y_max) || !(resolution > 0.0) || !(half_width >= 0.0)) {
    throw Error(ErrorKind::invalid_argument, "raster spec needs ordered ranges and a positive resolution");
  }
}

std::size_t RasterSpec::width() const {
  return static_cast<std::size_t>(std::max(1.0, std::round((x_max - x_min) / resolution)));
}

std::size_t RasterSpec::height() const {
  return static_cast<std::size_t>(std::max(1.0, std::round((y_max - y_min) / resolution)));
}

std::size_t Mask::count() const { return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1)); }

namespace {

void draw_segment(Mask& mask, const RasterSpec& spec, const Point2& a, const Point2& b) {
  const double r = spec.half_width;
  const double res = spec.resolution;
  const auto w = static_cast<long long>(mask.width());
  const auto h = static_cast<long long>(mask.height());
  // Candidate pixel range: centres within the segment's box grown by the half-width.
  auto col_lo = static_cast<long long>(std::floor((std::min(a.x, b.x) - r - spec.x_min) / res - 0.5));
  auto col_hi = static_cast<long long>(std::ceil((std::max(a.x, b.x) + r - spec.x_min) / res - 0.5));
  auto row_lo = static_cast<long long>(std::floor((std::min(a.y, b.y) - r - spec.y_min) / res - 0.5));
  auto row_hi = static_cast<long long>(std::ceil((std::max(a.y, b.y) + r - spec.y_min) / res - 0.5));
  col_lo = std::max(col_lo, 0LL);
  row_lo = std::max(row_lo, 0LL);
  col_hi = std::min(col_hi, w - 1);
  row_hi = std::min(row_hi, h - 1);
  for (long long row = row_lo; row <= row_hi; ++row) {
    const double cy = spec.y_min + (static_cast<double>(row) + 0.5) * res;
    for (long long col = col_lo; col <= col_hi; ++col) {
      const double cx = spec.x_min + (static_cast<double>(col) + 0.5) * res;
      if (segment_distance({cx, cy}, a, b) <= r) mask.set(static_cast<std::size_t>(col), static_cast<std::size_t>(row));
    }
  }
}

}  // namespace

std::array<Mask, 3> rasterize(std::span<const MapElement> elements, const RasterSpec& spec) {
  spec.validate();
  std::array<Mask, 3> masks;
  for (auto& m : masks) m = Mask(spec.width(), spec.height());
  for (const auto& e : elements) {
    Mask& mask = masks[static_cast<std::size_t>(e.cls)];
    for (std::size_t k = 1; k < e.points.size(); ++k) draw_segment(mask, spec, e.points[k - 1], e.points[k]);
  }
  return masks;
}

double iou(const Mask& a, const Mask& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorKind::shape_mismatch, "masks differ in shape");
  }
  std::size_t inter = 0;
  std::size_t uni = 0;
  const auto ab = a.bits();
  const auto bb = b.bits();
  for (std::size_t i = 0; i < ab.size(); ++i) {
    inter += (ab[i] & bb[i]);
    uni += (ab[i] | bb[i]);
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

IouReport evaluate_iou(const FrameElements& preds, const FrameElements& gts, const RasterSpec& spec) {
  spec.validate();
  std::map<std::string, bool> frames;
  for (const auto& [f, e] : gts) frames[f] = true;
  for (const auto& [f, e] : preds) frames[f] = true;
  IouReport report;
  report.frames = frames.size();
  const std::vector<MapElement> none;
  for (const auto& [frame, unused] : frames) {
    auto p = preds.find(frame);
    auto g = gts.find(frame);
    const auto pm = rasterize(p == preds.end() ? none : p->second, spec);
    const auto gm = rasterize(g == gts.end() ? none : g->second, spec);
    for (std::size_t c = 0; c < 3; ++c) {
      const auto pb = pm[c].bits();
      const auto gb = gm[c].bits();
      for (std::size_t i = 0; i < pb.size(); ++i) {
        report.intersection[c] += (pb[i] & gb[i]);
        report.union_[c] += (pb[i] | gb[i]);
      }
    }
  }
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t c = 0; c < 3; ++c) {
    if (report.union_[c] == 0) continue;
    report.iou[c] = static_cast<double>(report.intersection[c]) / static_cast<double>(report.union_[c]);
    sum += *report.iou[c];
    ++n;
  }
  if (n > 0) report.mean = sum / static_cast<double>(n);
  return report;
}

}  // namespace geosplit
