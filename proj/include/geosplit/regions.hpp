#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "geosplit/geometry.hpp"
#include "geosplit/split_assignment.hpp"

namespace geosplit {

/// A named polygon on one map, labelled with the set its samples go to.
/// Lower priority numbers win where regions overlap.
struct Region {
  std::string name;
  std::string map_id;
  SetLabel target_set = SetLabel::train;
  int priority = 0;
  std::vector<Point2> polygon;

  friend bool operator==(const Region&, const Region&) = default;
};

struct RegionSet {
  std::vector<Region> regions;

  /// Regions of `map_id` sorted by ascending priority.
  std::vector<const Region*> ordered_for_map(const std::string& map_id) const;

  friend bool operator==(const RegionSet&, const RegionSet&) = default;
};

/// Throws invalid-polygon(name) for a non-simple or non-finite polygon or a
/// target of "unassigned", duplicate-priority(map) for clashing priorities.
void validate_regions(const RegionSet& regions);

/// regions.json: {"regions":[{"name","map_id","set","priority","polygon":[[x,y],...]}]}
RegionSet load_regions(const std::filesystem::path& path);
RegionSet parse_regions(std::string_view text);
std::string regions_json_string(const RegionSet& regions);

}  // namespace geosplit
