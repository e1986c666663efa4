#include "geosplit/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geosplit/error.hpp"

namespace geosplit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Absolute slack on ring lower bounds; only delays termination, never alters results.
double bound_slack(double x, double y) { return 1e-9 * (1.0 + std::abs(x) + std::abs(y)); }

}  // namespace

SpatialIndex::SpatialIndex(const Dataset& ds, std::span<const std::size_t> subset, double cell_size)
    : cell_size_(cell_size) {
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw Error(ErrorKind::invalid_argument, "cell_size must be positive");
  }
  for (std::size_t idx : subset) {
    if (idx >= ds.size()) throw Error(ErrorKind::unknown_sample_id, "subset index out of range", std::to_string(idx));
    const Sample& s = ds[idx];
    MapGrid& grid = maps_[s.map_id];
    const CellIndex cell = cell_of(s.x, s.y, cell_size_);
    grid.buckets[cell].push_back({s.x, s.y, idx});
    grid.ids[cell].push_back(idx);
    ++size_;
  }
  for (auto& [map_id, grid] : maps_) {
    grid.occupied.reserve(grid.buckets.size());
    for (const auto& [cell, entries] : grid.buckets) grid.occupied.push_back(cell);
    std::sort(grid.occupied.begin(), grid.occupied.end());
    grid.min_i = grid.max_i = grid.occupied.front().i;
    grid.min_j = grid.max_j = grid.occupied.front().j;
    for (const auto& c : grid.occupied) {
      grid.min_i = std::min(grid.min_i, c.i);
      grid.max_i = std::max(grid.max_i, c.i);
      grid.min_j = std::min(grid.min_j, c.j);
      grid.max_j = std::max(grid.max_j, c.j);
    }
  }
}

SpatialIndex SpatialIndex::from_ids(const Dataset& ds, std::span<const std::string> ids, double cell_size) {
  std::vector<std::size_t> subset;
  subset.reserve(ids.size());
  for (const auto& id : ids) subset.push_back(ds.require_index(id));
  return SpatialIndex(ds, subset, cell_size);
}

std::span<const std::size_t> SpatialIndex::bucket(const std::string& map_id, CellIndex cell) const {
  auto m = maps_.find(map_id);
  if (m == maps_.end()) return {};
  auto b = m->second.ids.find(cell);
  if (b == m->second.ids.end()) return {};
  return b->second;
}

std::size_t SpatialIndex::bucket_count(const std::string& map_id) const {
  auto m = maps_.find(map_id);
  return m == maps_.end() ? 0 : m->second.buckets.size();
}

double SpatialIndex::scan_bucket(const MapGrid& grid, CellIndex cell, double x, double y, double best) const {
  auto it = grid.buckets.find(cell);
  if (it == grid.buckets.end()) return best;
  for (const Entry& e : it->second) best = std::min(best, planar_distance(x, y, e.x, e.y));
  return best;
}

double SpatialIndex::min_cell_distance(CellIndex cell, double x, double y) const {
  const double lo_x = static_cast<double>(cell.i) * cell_size_;
  const double hi_x = static_cast<double>(cell.i + 1) * cell_size_;
  const double lo_y = static_cast<double>(cell.j) * cell_size_;
  const double hi_y = static_cast<double>(cell.j + 1) * cell_size_;
  const double dx = std::max({lo_x - x, 0.0, x - hi_x});
  const double dy = std::max({lo_y - y, 0.0, y - hi_y});
  return std::sqrt(dx * dx + dy * dy);
}

std::optional<double> SpatialIndex::nearest_distance(const std::string& map_id, double x, double y) const {
  auto m = maps_.find(map_id);
  if (m == maps_.end()) return std::nullopt;
  const MapGrid& grid = m->second;
  const CellIndex q = cell_of(x, y, cell_size_);
  const double slack = bound_slack(x, y);
  const double c = cell_size_;

  double best = scan_bucket(grid, q, x, y, kInf);
  for (long long r = 1;; ++r) {
    // Everything outside the (2r-1)^2 block already scanned is at least this far away.
    const long long inner = r - 1;
    const double bound = std::min({x - static_cast<double>(q.i - inner) * c,
                                   static_cast<double>(q.i + inner + 1) * c - x,
                                   y - static_cast<double>(q.j - inner) * c,
                                   static_cast<double>(q.j + inner + 1) * c - y});
    if (best <= bound - slack) break;
    if (q.i - inner <= grid.min_i && q.i + inner >= grid.max_i && q.j - inner <= grid.min_j &&
        q.j + inner >= grid.max_j) {
      break;
    }

    const auto side = static_cast<double>(2 * r + 1);
    if (side * side > 4.0 * static_cast<double>(grid.occupied.size())) {
      // Sparse map: cheaper to visit the remaining occupied cells directly.
      for (const CellIndex& cell : grid.occupied) {
        if (std::max(std::llabs(cell.i - q.i), std::llabs(cell.j - q.j)) <= inner) continue;
        if (min_cell_distance(cell, x, y) > best + slack) continue;
        best = scan_bucket(grid, cell, x, y, best);
      }
      break;
    }

    const long long i_lo = std::max(q.i - r, grid.min_i);
    const long long i_hi = std::min(q.i + r, grid.max_i);
    const long long j_lo = std::max(q.j - r, grid.min_j);
    const long long j_hi = std::min(q.j + r, grid.max_j);
    if (q.j - r >= grid.min_j && q.j - r <= grid.max_j) {
      for (long long i = i_lo; i <= i_hi; ++i) best = scan_bucket(grid, {i, q.j - r}, x, y, best);
    }
    if (q.j + r >= grid.min_j && q.j + r <= grid.max_j) {
      for (long long i = i_lo; i <= i_hi; ++i) best = scan_bucket(grid, {i, q.j + r}, x, y, best);
    }
    const long long jj_lo = std::max(j_lo, q.j - r + 1);
    const long long jj_hi = std::min(j_hi, q.j + r - 1);
    if (q.i - r >= grid.min_i && q.i - r <= grid.max_i) {
      for (long long j = jj_lo; j <= jj_hi; ++j) best = scan_bucket(grid, {q.i - r, j}, x, y, best);
    }
    if (q.i + r >= grid.min_i && q.i + r <= grid.max_i) {
      for (long long j = jj_lo; j <= jj_hi; ++j) best = scan_bucket(grid, {q.i + r, j}, x, y, best);
    }
  }
  return best;
}

std::size_t CellHistogram::total() const {
  std::size_t n = 0;
  for (const auto& [map_id, cells] : counts) {
    for (const auto& [cell, count] : cells) n += count;
  }
  return n;
}

std::size_t CellHistogram::non_empty_cells() const {
  std::size_t n = 0;
  for (const auto& [map_id, cells] : counts) n += cells.size();
  return n;
}

CellHistogram cell_histogram(const Dataset& ds, std::span<const std::size_t> subset, double cell_size) {
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw Error(ErrorKind::invalid_argument, "cell_size must be positive");
  }
  CellHistogram h;
  h.cell_size = cell_size;
  for (std::size_t idx : subset) {
    if (idx >= ds.size()) throw Error(ErrorKind::unknown_sample_id, "subset index out of range", std::to_string(idx));
    const Sample& s = ds[idx];
    ++h.counts[s.map_id][cell_of(s.x, s.y, cell_size)];
  }
  for (const auto& [map_id, cells] : h.counts) {
    auto& per_map = h.marginal_by_map[map_id];
    for (const auto& [cell, count] : cells) {
      ++per_map[count];
      ++h.marginal[count];
    }
  }
  return h;
}

CellHistogram cell_histogram(const Dataset& ds, double cell_size) {
  std::vector<std::size_t> all(ds.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return cell_histogram(ds, all, cell_size);
}

Heatmap heatmap_export(const CellHistogram& h, const std::string& map_id) {
  auto it = h.counts.find(map_id);
  if (it == h.counts.end() || it->second.empty()) {
    throw Error(ErrorKind::unknown_map, "no samples on this map", map_id);
  }
  const auto& cells = it->second;
  long long i0 = cells.begin()->first.i, i1 = i0;
  long long j0 = cells.begin()->first.j, j1 = j0;
  for (const auto& [cell, count] : cells) {
    i0 = std::min(i0, cell.i);
    i1 = std::max(i1, cell.i);
    j0 = std::min(j0, cell.j);
    j1 = std::max(j1, cell.j);
  }
  Heatmap out;
  out.map_id = map_id;
  out.cell_size = h.cell_size;
  out.i0 = i0;
  out.j0 = j0;
  out.counts.assign(static_cast<std::size_t>(i1 - i0 + 1), std::vector<std::size_t>(static_cast<std::size_t>(j1 - j0 + 1), 0));
  for (const auto& [cell, count] : cells) {
    out.counts[static_cast<std::size_t>(cell.i - i0)][static_cast<std::size_t>(cell.j - j0)] = count;
  }
  return out;
}

}  // namespace geosplit
