#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace geosplit {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Planar Euclidean distance. Every distance in the library goes through this
/// expression so that independent scans produce bit-identical results.
inline double planar_distance(double ax, double ay, double bx, double by) {
  const double dx = ax - bx;
  const double dy = ay - by;
  return std::sqrt(dx * dx + dy * dy);
}

inline double planar_distance(const Point2& a, const Point2& b) {
  return planar_distance(a.x, a.y, b.x, b.y);
}

/// Distance from `p` to the closed segment [a, b].
double segment_distance(const Point2& p, const Point2& a, const Point2& b);

struct Box {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  bool contains(const Point2& p) const {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }
};

Box bounding_box(std::span<const Point2> points);

/// Even-odd containment for an implicitly closed ring. Points lying exactly on an
/// edge or vertex count as inside.
bool polygon_contains(std::span<const Point2> ring, const Point2& p);

/// True when the ring has >= 3 finite vertices, no zero-length edge, and no two
/// edges touch except adjacent edges at their shared vertex.
bool is_simple_polygon(std::span<const Point2> ring);

double polygon_area(std::span<const Point2> ring);

/// Integer cell index of `v` for cells of side `cell` anchored at 0:
/// i * cell <= v < (i + 1) * cell, evaluated with the same products used for
/// cell corner coordinates.
long long cell_coord(double v, double cell);

}  // namespace geosplit
