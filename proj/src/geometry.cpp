#include "geosplit/geometry.hpp"

#include <algorithm>
#include <limits>

namespace geosplit {

double segment_distance(const Point2& p, const Point2& a, const Point2& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return planar_distance(p, a);
  double t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return planar_distance(p.x, p.y, a.x + t * dx, a.y + t * dy);
}

Box bounding_box(std::span<const Point2> points) {
  Box box{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& p : points) {
    box.min_x = std::min(box.min_x, p.x);
    box.min_y = std::min(box.min_y, p.y);
    box.max_x = std::max(box.max_x, p.x);
    box.max_y = std::max(box.max_y, p.y);
  }
  return box;
}

namespace {

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

int orientation(const Point2& o, const Point2& a, const Point2& b) {
  const double c = cross(o, a, b);
  return (c > 0.0) - (c < 0.0);
}

// p is collinear with [a, b]; is it within the segment's extent?
bool within_extent(const Point2& a, const Point2& b, const Point2& p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool on_segment(const Point2& a, const Point2& b, const Point2& p) {
  return orientation(a, b, p) == 0 && within_extent(a, b, p);
}

bool segments_intersect(const Point2& p1, const Point2& p2, const Point2& q1, const Point2& q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && within_extent(p1, p2, q1)) return true;
  if (o2 == 0 && within_extent(p1, p2, q2)) return true;
  if (o3 == 0 && within_extent(q1, q2, p1)) return true;
  if (o4 == 0 && within_extent(q1, q2, p2)) return true;
  return false;
}

}  // namespace

bool polygon_contains(std::span<const Point2> ring, const Point2& p) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2& a = ring[i];
    const Point2& b = ring[j];
    if (on_segment(a, b, p)) return true;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

bool is_simple_polygon(std::span<const Point2> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  for (const auto& p : ring) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (ring[i] == ring[(i + 1) % n]) return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a1 = ring[i];
    const Point2& a2 = ring[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point2& b1 = ring[j];
      const Point2& b2 = ring[(j + 1) % n];
      const bool next = j == i + 1;
      const bool wrap = i == 0 && j == n - 1;
      if (next || wrap) {
        // Adjacent edges share exactly one vertex; anything more is a fold-back.
        const Point2& shared = next ? a2 : a1;
        const Point2& far_a = next ? a1 : a2;
        const Point2& far_b = next ? b2 : b1;
        if (n == 3) {
          if (orientation(a1, a2, ring[(i + 2) % n]) == 0) return false;
          continue;
        }
        if (orientation(far_a, shared, far_b) == 0) {
          // Collinear: overlapping iff the far ends lie on the same side of the shared vertex.
          const double dot = (far_a.x - shared.x) * (far_b.x - shared.x) +
                             (far_a.y - shared.y) * (far_b.y - shared.y);
          if (dot > 0.0) return false;
        }
        continue;
      }
      if (segments_intersect(a1, a2, b1, b2)) return false;
    }
  }
  return true;
}

double polygon_area(std::span<const Point2> ring) {
  double twice = 0.0;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    twice += ring[j].x * ring[i].y - ring[i].x * ring[j].y;
  }
  return 0.5 * twice;
}

long long cell_coord(double v, double cell) {
  auto i = static_cast<long long>(std::floor(v / cell));
  if (v < static_cast<double>(i) * cell) {
    --i;
  } else if (v >= static_cast<double>(i + 1) * cell) {
    ++i;
  }
  return i;
}

}  // namespace geosplit
