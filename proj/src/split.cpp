#include "geosplit/split.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "geosplit/error.hpp"
#include "geosplit/leakage.hpp"
#include "geosplit/parallel.hpp"

namespace geosplit {

using nlohmann::json;

std::string_view to_string(AssignMode m) { return m == AssignMode::per_sample ? "per_sample" : "per_sequence"; }

std::optional<AssignMode> parse_assign_mode(std::string_view s) {
  if (s == "per_sample") return AssignMode::per_sample;
  if (s == "per_sequence") return AssignMode::per_sequence;
  return std::nullopt;
}

namespace {

SetLabel label_or_unassigned(const SplitAssignment& split, const std::string& id) {
  return split.get(id).value_or(SetLabel::unassigned);
}

struct PreparedRegion {
  const Region* region;
  Box box;
};

std::map<std::string, std::vector<PreparedRegion>> prepare(const RegionSet& regions) {
  std::map<std::string, std::vector<PreparedRegion>> out;
  std::set<std::string> maps;
  for (const auto& r : regions.regions) maps.insert(r.map_id);
  for (const auto& m : maps) {
    auto& list = out[m];
    for (const Region* r : regions.ordered_for_map(m)) list.push_back({r, bounding_box(r->polygon)});
  }
  return out;
}

SetLabel label_in(const std::vector<PreparedRegion>& ordered, const Point2& p) {
  for (const auto& pr : ordered) {
    if (pr.box.contains(p) && polygon_contains(pr.region->polygon, p)) return pr.region->target_set;
  }
  return SetLabel::unassigned;
}

}  // namespace

CutReport cut_report(const Dataset& ds, const SplitAssignment& split) {
  CutReport report;
  for (const auto& [seq, members] : ds.sequences()) {
    auto& runs = report.runs[seq];
    for (std::size_t idx : members) {
      const Sample& s = ds[idx];
      const SetLabel label = label_or_unassigned(split, s.id);
      if (runs.empty() || runs.back().set != label) {
        runs.push_back({label, s.id, s.id, 1});
      } else {
        runs.back().last_id = s.id;
        ++runs.back().count;
      }
    }
    if (runs.size() > 1) ++report.cut_sequences;
  }
  return report;
}

SetLabel region_label(const RegionSet& regions, const std::string& map_id, const Point2& p) {
  for (const Region* r : regions.ordered_for_map(map_id)) {
    if (polygon_contains(r->polygon, p)) return r->target_set;
  }
  return SetLabel::unassigned;
}

AssignResult assign_by_regions(const Dataset& ds, const RegionSet& regions, AssignMode mode) {
  validate_regions(regions);
  const auto prepared = prepare(regions);
  const std::vector<PreparedRegion> none;
  std::vector<SetLabel> labels(ds.size(), SetLabel::unassigned);
  parallel_for(ds.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto it = prepared.find(ds[i].map_id);
      labels[i] = label_in(it == prepared.end() ? none : it->second, ds[i].position());
    }
  });
  if (mode == AssignMode::per_sequence) {
    for (const auto& [seq, members] : ds.sequences()) {
      std::array<std::size_t, 4> votes{};
      for (std::size_t idx : members) ++votes[label_index(labels[idx])];
      // kAllLabels order doubles as the tie-break order.
      SetLabel winner = SetLabel::train;
      for (SetLabel l : kAllLabels) {
        if (votes[label_index(l)] > votes[label_index(winner)]) winner = l;
      }
      for (std::size_t idx : members) labels[idx] = winner;
    }
  }
  AssignResult result{SplitAssignment::from_labels(ds, labels, "regions:" + std::string(to_string(mode))), {}};
  result.cuts = cut_report(ds, result.split);
  return result;
}

double BalanceReport::max_deviation() const {
  double worst = 0.0;
  for (const auto& k : keys) {
    for (const auto& v : k.values) {
      for (SetLabel s : kSplitSets) {
        if (const auto& r = v.set_ratio[label_index(s)]) worst = std::max(worst, std::abs(*r - v.full_ratio));
      }
    }
  }
  return worst;
}

BalanceReport balance_report(const Dataset& ds, const SplitAssignment& split,
                             std::span<const std::string> attribute_keys) {
  BalanceReport report;
  std::vector<SetLabel> labels(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    labels[i] = label_or_unassigned(split, ds[i].id);
    ++report.set_counts[label_index(labels[i])];
    ++report.map_counts[ds[i].map_id][label_index(labels[i])];
  }
  const std::size_t assigned = report.set_counts[0] + report.set_counts[1] + report.set_counts[2];
  if (assigned > 0) {
    for (SetLabel s : kSplitSets) {
      report.proportions[label_index(s)] =
          static_cast<double>(report.set_counts[label_index(s)]) / static_cast<double>(assigned);
    }
  }
  for (const auto& key : attribute_keys) {
    KeyBalance kb;
    kb.key = key;
    std::map<std::string, ValueBalance> values;
    std::size_t covered = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const auto li = label_index(labels[i]);
      auto it = ds[i].attrs.find(key);
      if (it == ds[i].attrs.end()) {
        ++kb.missing[li];
        continue;
      }
      ++covered;
      ++kb.with_key[li];
      auto& vb = values[it->second];
      vb.value = it->second;
      ++vb.set_count[li];
      ++vb.full_count;
    }
    kb.coverage = ds.empty() ? 0.0 : static_cast<double>(covered) / static_cast<double>(ds.size());
    for (auto& [value, vb] : values) {
      vb.full_ratio = static_cast<double>(vb.full_count) / static_cast<double>(covered);
      for (SetLabel l : kAllLabels) {
        const auto li = label_index(l);
        if (kb.with_key[li] > 0) {
          vb.set_ratio[li] = static_cast<double>(vb.set_count[li]) / static_cast<double>(kb.with_key[li]);
        }
      }
      kb.values.push_back(std::move(vb));
    }
    report.keys.push_back(std::move(kb));
  }
  return report;
}

std::vector<FoldSpec> fold_preset(std::string_view name) {
  if (name == "nuscenes") {
    return {
        {"A", {"boston-seaport", "singapore-onenorth"}, {"singapore-queenstown", "singapore-hollandvillage"}},
        {"B", {"boston-seaport", "singapore-queenstown", "singapore-hollandvillage"}, {"singapore-onenorth"}},
    };
  }
  if (name == "argoverse2") {
    // "Rest" = Austin, Detroit, Palo Alto, Washington DC.
    return {
        {"A", {"MIA", "PIT"}, {"ATX", "DTW", "PAO", "WDC"}},
        {"B", {"MIA", "ATX", "DTW", "PAO", "WDC"}, {"PIT"}},
        {"C", {"PIT", "ATX", "DTW", "PAO", "WDC"}, {"MIA"}},
    };
  }
  throw Error(ErrorKind::invalid_argument, "unknown fold preset (expected nuscenes or argoverse2)", std::string(name));
}

std::vector<std::string> fold_preset_names() { return {"nuscenes", "argoverse2"}; }

std::vector<FoldSpec> parse_folds(std::string_view json_text) {
  std::vector<FoldSpec> out;
  try {
    const json doc = json::parse(json_text);
    for (const auto& f : doc.at("folds")) {
      FoldSpec spec;
      spec.name = f.at("name").get<std::string>();
      spec.train_maps = f.at("train_maps").get<std::vector<std::string>>();
      spec.val_maps = f.at("val_maps").get<std::vector<std::string>>();
      out.push_back(std::move(spec));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, e.what(), "folds");
  }
  return out;
}

std::string folds_json_string(std::span<const FoldSpec> folds) {
  json arr = json::array();
  for (const auto& f : folds) arr.push_back({{"name", f.name}, {"train_maps", f.train_maps}, {"val_maps", f.val_maps}});
  return json{{"folds", std::move(arr)}}.dump(2) + "\n";
}

std::vector<FoldResult> citywise_folds(const Dataset& ds, std::span<const FoldSpec> folds) {
  std::vector<FoldResult> out;
  for (const auto& spec : folds) {
    const std::set<std::string> train(spec.train_maps.begin(), spec.train_maps.end());
    const std::set<std::string> val(spec.val_maps.begin(), spec.val_maps.end());
    for (const auto& m : train) {
      if (val.count(m)) throw Error(ErrorKind::overlapping_maps, "map " + m + " is both train and val", spec.name);
    }
    for (const auto* group : {&train, &val}) {
      for (const auto& m : *group) {
        if (!ds.maps().count(m)) throw Error(ErrorKind::unknown_map, "fold " + spec.name + " names a map absent from the dataset", m);
      }
    }
    FoldResult r;
    r.spec = spec;
    std::vector<SetLabel> labels(ds.size(), SetLabel::unassigned);
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (train.count(ds[i].map_id)) {
        labels[i] = SetLabel::train;
        ++r.train;
      } else if (val.count(ds[i].map_id)) {
        labels[i] = SetLabel::val;
        ++r.val;
      } else {
        ++r.unassigned;
      }
    }
    if (r.train + r.val > 0) r.train_fraction = static_cast<double>(r.train) / static_cast<double>(r.train + r.val);
    r.split = SplitAssignment::from_labels(ds, labels, "fold:" + spec.name);
    out.push_back(std::move(r));
  }
  return out;
}

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.passed; });
}

const ValidationCheck* ValidationReport::find(std::string_view name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

ValidationReport validate_split(const Dataset& ds, const SplitAssignment& split, const RegionSet* regions,
                                const ValidationOptions& options) {
  ValidationReport report;

  {
    ValidationCheck c{"totality", true, std::nullopt, 0.0, {}};
    const auto missing = split.missing(ds);
    const auto extra = split.extraneous(ds);
    c.measured = static_cast<double>(missing.size() + extra.size());
    c.passed = missing.empty() && extra.empty();
    for (const auto& id : missing) c.details.push_back("missing:" + id);
    for (const auto& id : extra) c.details.push_back("unknown:" + id);
    report.checks.push_back(std::move(c));
  }

  std::vector<SetLabel> labels(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) labels[i] = label_or_unassigned(split, ds[i].id);
  const auto complete = SplitAssignment::from_labels(ds, labels, split.provenance());

  {
    ValidationCheck c{"disjointness", true, std::nullopt, options.leak_bound, {}};
    try {
      const double tau[] = {options.leak_threshold};
      const auto leak = audit(ds, complete, tau);
      std::optional<double> worst;
      for (const auto* s : {&leak.all.val, &leak.all.test}) {
        if (s->ratios[0]) worst = std::max(worst.value_or(0.0), *s->ratios[0]);
        c.details.push_back(std::string(to_string(s->set)) + ":" +
                            (s->ratios[0] ? std::to_string(*s->ratios[0]) : std::string("none")));
      }
      c.measured = worst;
      c.passed = !worst || *worst <= options.leak_bound;
    } catch (const Error& e) {
      c.passed = false;
      c.details.push_back(e.what());
    }
    report.checks.push_back(std::move(c));
  }

  const auto keys = options.attribute_keys.empty() ? ds.attribute_keys() : options.attribute_keys;
  const auto balance = balance_report(ds, complete, keys);

  {
    ValidationCheck c{"proportions", false, std::nullopt, options.proportion_tolerance, {}};
    if (balance.proportions[0]) {
      double worst = 0.0;
      for (SetLabel s : kSplitSets) {
        const double p = *balance.proportions[label_index(s)];
        const double t = options.targets[label_index(s)];
        worst = std::max(worst, std::abs(p - t));
        c.details.push_back(std::string(to_string(s)) + ":" + std::to_string(p));
      }
      c.measured = worst;
      c.passed = worst <= options.proportion_tolerance;
    } else {
      c.details.push_back("no assigned samples");
    }
    report.checks.push_back(std::move(c));
  }

  {
    ValidationCheck c{"balance", true, balance.max_deviation(), options.balance_tolerance, {}};
    c.passed = *c.measured <= options.balance_tolerance;
    if (keys.empty()) c.details.push_back("no attributes");
    for (const auto& k : balance.keys) {
      if (k.coverage == 0.0) c.details.push_back("no coverage:" + k.key);
    }
    report.checks.push_back(std::move(c));
  }

  if (regions) {
    ValidationCheck c{"regions", false, std::nullopt, 0.0, {}};
    try {
      const auto expected = assign_by_regions(ds, *regions, AssignMode::per_sample).split;
      std::size_t mismatches = 0;
      for (std::size_t i = 0; i < ds.size(); ++i) {
        if (expected.get(ds[i].id) != split.get(ds[i].id)) {
          if (++mismatches <= 20) c.details.push_back("mismatch:" + ds[i].id);
        }
      }
      c.measured = static_cast<double>(mismatches);
      c.passed = mismatches == 0;
    } catch (const Error& e) {
      c.details.push_back(e.what());
    }
    report.checks.push_back(std::move(c));
  }
  return report;
}

}  // namespace geosplit
