#include "geosplit/regions.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "geosplit/error.hpp"

namespace geosplit {

using nlohmann::json;

std::vector<const Region*> RegionSet::ordered_for_map(const std::string& map_id) const {
  std::vector<const Region*> out;
  for (const auto& r : regions) {
    if (r.map_id == map_id) out.push_back(&r);
  }
  std::sort(out.begin(), out.end(), [](const Region* a, const Region* b) { return a->priority < b->priority; });
  return out;
}

void validate_regions(const RegionSet& regions) {
  std::map<std::string, std::set<int>> priorities;
  for (const auto& r : regions.regions) {
    if (r.target_set == SetLabel::unassigned) {
      throw Error(ErrorKind::invalid_polygon, "region target must be train, val or test", r.name);
    }
    if (!is_simple_polygon(r.polygon)) {
      throw Error(ErrorKind::invalid_polygon, "polygon must have >= 3 finite vertices and be simple", r.name);
    }
    if (!priorities[r.map_id].insert(r.priority).second) {
      throw Error(ErrorKind::duplicate_priority,
                  "priority " + std::to_string(r.priority) + " used twice (region " + r.name + ")", r.map_id);
    }
  }
}

RegionSet load_regions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string(), path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_regions(buf.str());
}

RegionSet parse_regions(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::parse, e.what(), "regions");
  }
  if (!doc.is_object() || !doc.contains("regions") || !doc["regions"].is_array()) {
    throw Error(ErrorKind::parse, "expected {\"regions\": [...]}", "regions");
  }
  RegionSet out;
  std::size_t k = 0;
  for (const auto& r : doc["regions"]) {
    const std::string where = "regions[" + std::to_string(k++) + "]";
    try {
      Region region;
      region.name = r.at("name").get<std::string>();
      region.map_id = r.at("map_id").get<std::string>();
      const auto set = parse_set_label(r.at("set").get<std::string>());
      if (!set || *set == SetLabel::unassigned) {
        throw Error(ErrorKind::parse, "set must be train, val or test", where + ".set");
      }
      region.target_set = *set;
      region.priority = r.at("priority").get<int>();
      for (const auto& p : r.at("polygon")) {
        if (!p.is_array() || p.size() != 2) throw Error(ErrorKind::parse, "vertices must be [x,y]", where + ".polygon");
        region.polygon.push_back({p[0].get<double>(), p[1].get<double>()});
      }
      out.regions.push_back(std::move(region));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::parse, e.what(), where);
    }
  }
  return out;
}

std::string regions_json_string(const RegionSet& regions) {
  json arr = json::array();
  for (const auto& r : regions.regions) {
    json poly = json::array();
    for (const auto& p : r.polygon) poly.push_back({p.x, p.y});
    arr.push_back({{"name", r.name},
                   {"map_id", r.map_id},
                   {"set", std::string(to_string(r.target_set))},
                   {"priority", r.priority},
                   {"polygon", std::move(poly)}});
  }
  return json{{"regions", std::move(arr)}}.dump(2) + "\n";
}

}  // namespace geosplit
