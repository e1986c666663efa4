#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "geosplit/ingest.hpp"
#include "geosplit/regions.hpp"
#include "geosplit/split.hpp"

namespace geosplit {

struct PartitionOptions {
  std::array<double, 3> targets{0.70, 0.15, 0.15};
  double cell_size = 60.0;
  std::vector<std::string> attribute_keys;
  /// Samples labelled train/val/test here keep that label; unassigned or absent
  /// ids are free.
  std::optional<SplitAssignment> locked;
  std::uint64_t seed = 0;
  /// Weight of the attribute-balance term in the deficit score.
  double balance_weight = 1.0;
};

struct PartitionResult {
  RegionSet regions;
  SplitAssignment split;
  CutReport cuts;
};

/// Greedy region growing over the grid of non-empty cells. One block per set is
/// seeded on every map; then the frontier cell whose attachment gives the lowest
/// deficit score
///   sum_s |p_s - target_s| + w * sum_keys sum_s sum_values |r_s,v - r_full,v|
/// is claimed until every cell is owned. Blocks are emitted as rectangular
/// column strips and the split is produced by per-sample region assignment.
///
/// Throws invalid-argument for bad targets/cell size and infeasible-lock when the
/// locked samples force a set beyond target + 0.10 or two sets share a cell.
PartitionResult auto_partition(const Dataset& ds, const PartitionOptions& options);

}  // namespace geosplit
