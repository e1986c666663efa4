#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "geosplit/ingest.hpp"

namespace geosplit {

struct CellIndex {
  long long i = 0;
  long long j = 0;

  friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

struct CellIndexHash {
  std::size_t operator()(const CellIndex& c) const noexcept {
    const auto a = static_cast<std::uint64_t>(c.i);
    const auto b = static_cast<std::uint64_t>(c.j);
    return static_cast<std::size_t>(a * 0x9E3779B97F4A7C15ULL ^ (b + 0x7F4A7C159E3779B9ULL + (a << 6) + (a >> 2)));
  }
};

inline CellIndex cell_of(double x, double y, double cell_size) {
  return {cell_coord(x, cell_size), cell_coord(y, cell_size)};
}

/// Uniform-grid bucket index over a subset of a dataset's samples, one grid per
/// map, anchored at each map's origin. Immutable after construction.
class SpatialIndex {
 public:
  static constexpr double kDefaultCellSize = 50.0;

  SpatialIndex() = default;

  /// Index over `subset` (dataset positions). Throws invalid-argument if
  /// cell_size <= 0.
  SpatialIndex(const Dataset& ds, std::span<const std::size_t> subset, double cell_size = kDefaultCellSize);

  /// Index over the samples named by `ids`; throws unknown-sample-id.
  static SpatialIndex from_ids(const Dataset& ds, std::span<const std::string> ids,
                               double cell_size = kDefaultCellSize);

  double cell_size() const { return cell_size_; }
  std::size_t size() const { return size_; }
  bool has_map(const std::string& map_id) const { return maps_.count(map_id) != 0; }

  /// Sample positions in the bucket, or an empty span.
  std::span<const std::size_t> bucket(const std::string& map_id, CellIndex cell) const;
  std::size_t bucket_count(const std::string& map_id) const;

  /// Exact distance to the nearest indexed sample on `map_id`; nullopt when the
  /// map has no indexed samples.
  std::optional<double> nearest_distance(const std::string& map_id, double x, double y) const;
  std::optional<double> nearest_distance(const Sample& query) const {
    return nearest_distance(query.map_id, query.x, query.y);
  }

 private:
  struct Entry {
    double x;
    double y;
    std::size_t sample;
  };
  struct MapGrid {
    std::unordered_map<CellIndex, std::vector<Entry>, CellIndexHash> buckets;
    std::unordered_map<CellIndex, std::vector<std::size_t>, CellIndexHash> ids;
    std::vector<CellIndex> occupied;  // sorted
    long long min_i = 0, max_i = 0, min_j = 0, max_j = 0;
  };

  double scan_bucket(const MapGrid& grid, CellIndex cell, double x, double y, double best) const;
  double min_cell_distance(CellIndex cell, double x, double y) const;

  double cell_size_ = kDefaultCellSize;
  std::size_t size_ = 0;
  std::map<std::string, MapGrid> maps_;
};

/// Per-map sample counts on a grid of `cell_size` cells, plus the marginal
/// distribution count -> number of cells (per map and overall).
struct CellHistogram {
  double cell_size = 60.0;
  std::map<std::string, std::map<CellIndex, std::size_t>> counts;
  std::map<std::string, std::map<std::size_t, std::size_t>> marginal_by_map;
  std::map<std::size_t, std::size_t> marginal;

  std::size_t total() const;
  std::size_t non_empty_cells() const;
  friend bool operator==(const CellHistogram&, const CellHistogram&) = default;
};

CellHistogram cell_histogram(const Dataset& ds, std::span<const std::size_t> subset, double cell_size = 60.0);
/// Histogram over the whole dataset.
CellHistogram cell_histogram(const Dataset& ds, double cell_size = 60.0);

/// Dense matrix over the bounding box of the map's non-empty cells;
/// counts[i - i0][j - j0].
struct Heatmap {
  std::string map_id;
  double cell_size = 60.0;
  long long i0 = 0;
  long long j0 = 0;
  std::vector<std::vector<std::size_t>> counts;

  friend bool operator==(const Heatmap&, const Heatmap&) = default;
};

/// Throws unknown-map.
Heatmap heatmap_export(const CellHistogram& h, const std::string& map_id);

}  // namespace geosplit
