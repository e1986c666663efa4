#include "geosplit/json_io.hpp"

#include "geosplit/error.hpp"

namespace geosplit {

namespace {

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> opt_get(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<T>();
}

template <class T, std::size_t N>
json per_label(const std::array<T, N>& values) {
  json out = json::object();
  for (std::size_t i = 0; i < N; ++i) out[std::string(to_string(static_cast<SetLabel>(i)))] = values[i];
  return out;
}

template <class T, std::size_t N>
json per_label_opt(const std::array<std::optional<T>, N>& values) {
  json out = json::object();
  for (std::size_t i = 0; i < N; ++i) out[std::string(to_string(static_cast<SetLabel>(i)))] = opt(values[i]);
  return out;
}

template <class T, std::size_t N>
void read_per_label(const json& j, std::array<T, N>& out) {
  for (std::size_t i = 0; i < N; ++i) out[i] = j.at(std::string(to_string(static_cast<SetLabel>(i)))).get<T>();
}

template <class T, std::size_t N>
void read_per_label_opt(const json& j, std::array<std::optional<T>, N>& out) {
  for (std::size_t i = 0; i < N; ++i) out[i] = opt_get<T>(j.at(std::string(to_string(static_cast<SetLabel>(i)))));
}

SetLabel label_from(const json& j) {
  auto l = parse_set_label(j.get<std::string>());
  if (!l) throw Error(ErrorKind::parse, "unknown set label", j.get<std::string>());
  return *l;
}

ElementClass class_from(const json& j) {
  auto c = parse_element_class(j.get<std::string>());
  if (!c) throw Error(ErrorKind::parse, "unknown element class", j.get<std::string>());
  return *c;
}

}  // namespace

std::string canonical_dump(const json& j) { return j.dump(2) + "\n"; }

void to_json(json& j, const SetLeakage& v) {
  json ratios = json::array();
  for (const auto& r : v.ratios) ratios.push_back(opt(r));
  json pct = json::array();
  for (const auto& p : v.percentiles) pct.push_back({{"p", p.p}, {"distance", p.distance}});
  j = {{"set", std::string(to_string(v.set))},
       {"total", v.total},
       {"evaluated", v.evaluated},
       {"no_train_map", v.no_train_map},
       {"within", v.within},
       {"ratios", std::move(ratios)},
       {"percentiles", std::move(pct)}};
}

void from_json(const json& j, SetLeakage& v) {
  v.set = label_from(j.at("set"));
  v.total = j.at("total").get<std::size_t>();
  v.evaluated = j.at("evaluated").get<std::size_t>();
  v.no_train_map = j.at("no_train_map").get<std::size_t>();
  v.within = j.at("within").get<std::vector<std::size_t>>();
  v.ratios.clear();
  for (const auto& r : j.at("ratios")) v.ratios.push_back(opt_get<double>(r));
  v.percentiles.clear();
  for (const auto& p : j.at("percentiles")) v.percentiles.push_back({p.at("p").get<double>(), p.at("distance").get<double>()});
}

void to_json(json& j, const LeakageReport& v) {
  j = {{"thresholds", v.thresholds}, {"val", v.all.val}, {"test", v.all.test}, {"keyframes", nullptr}};
  if (v.keyframes) j["keyframes"] = {{"val", v.keyframes->val}, {"test", v.keyframes->test}};
}

void from_json(const json& j, LeakageReport& v) {
  v.thresholds = j.at("thresholds").get<std::vector<double>>();
  v.all.val = j.at("val").get<SetLeakage>();
  v.all.test = j.at("test").get<SetLeakage>();
  v.keyframes.reset();
  if (const auto& k = j.at("keyframes"); !k.is_null()) {
    v.keyframes = LeakageSection{k.at("val").get<SetLeakage>(), k.at("test").get<SetLeakage>()};
  }
}

void to_json(json& j, const CurvePoint& v) {
  j = {{"threshold", v.threshold}, {"val", opt(v.val_ratio)}, {"test", opt(v.test_ratio)}};
}

void from_json(const json& j, CurvePoint& v) {
  v.threshold = j.at("threshold").get<double>();
  v.val_ratio = opt_get<double>(j.at("val"));
  v.test_ratio = opt_get<double>(j.at("test"));
}

namespace {

json marginal_json(const std::map<std::size_t, std::size_t>& m) {
  json out = json::array();
  for (const auto& [count, cells] : m) out.push_back({count, cells});
  return out;
}

std::map<std::size_t, std::size_t> marginal_from(const json& j) {
  std::map<std::size_t, std::size_t> out;
  for (const auto& e : j) out[e.at(0).get<std::size_t>()] = e.at(1).get<std::size_t>();
  return out;
}

}  // namespace

void to_json(json& j, const CellHistogram& v) {
  json maps = json::object();
  for (const auto& [map_id, cells] : v.counts) {
    json list = json::array();
    for (const auto& [cell, count] : cells) list.push_back({cell.i, cell.j, count});
    json entry = {{"cells", std::move(list)}, {"marginal", json::array()}};
    if (auto it = v.marginal_by_map.find(map_id); it != v.marginal_by_map.end()) entry["marginal"] = marginal_json(it->second);
    maps[map_id] = std::move(entry);
  }
  j = {{"cell_size", v.cell_size}, {"maps", std::move(maps)}, {"marginal", marginal_json(v.marginal)},
       {"total", v.total()}, {"non_empty_cells", v.non_empty_cells()}};
}

void from_json(const json& j, CellHistogram& v) {
  v = CellHistogram{};
  v.cell_size = j.at("cell_size").get<double>();
  for (const auto& [map_id, entry] : j.at("maps").items()) {
    auto& cells = v.counts[map_id];
    for (const auto& c : entry.at("cells")) {
      cells[CellIndex{c.at(0).get<long long>(), c.at(1).get<long long>()}] = c.at(2).get<std::size_t>();
    }
    v.marginal_by_map[map_id] = marginal_from(entry.at("marginal"));
  }
  v.marginal = marginal_from(j.at("marginal"));
}

void to_json(json& j, const Heatmap& v) {
  j = {{"map_id", v.map_id}, {"cell_size", v.cell_size}, {"i0", v.i0}, {"j0", v.j0}, {"counts", v.counts}};
}

void from_json(const json& j, Heatmap& v) {
  v.map_id = j.at("map_id").get<std::string>();
  v.cell_size = j.at("cell_size").get<double>();
  v.i0 = j.at("i0").get<long long>();
  v.j0 = j.at("j0").get<long long>();
  v.counts = j.at("counts").get<std::vector<std::vector<std::size_t>>>();
}

void to_json(json& j, const BalanceReport& v) {
  json keys = json::array();
  for (const auto& k : v.keys) {
    json values = json::array();
    for (const auto& val : k.values) {
      values.push_back({{"value", val.value},
                        {"set_count", per_label(val.set_count)},
                        {"set_ratio", per_label_opt(val.set_ratio)},
                        {"full_count", val.full_count},
                        {"full_ratio", val.full_ratio}});
    }
    keys.push_back({{"key", k.key},
                    {"coverage", k.coverage},
                    {"with_key", per_label(k.with_key)},
                    {"missing", per_label(k.missing)},
                    {"values", std::move(values)}});
  }
  json maps = json::object();
  for (const auto& [m, counts] : v.map_counts) maps[m] = per_label(counts);
  j = {{"set_counts", per_label(v.set_counts)},
       {"proportions", per_label_opt(v.proportions)},
       {"keys", std::move(keys)},
       {"maps", std::move(maps)}};
}

void from_json(const json& j, BalanceReport& v) {
  v = BalanceReport{};
  read_per_label(j.at("set_counts"), v.set_counts);
  read_per_label_opt(j.at("proportions"), v.proportions);
  for (const auto& k : j.at("keys")) {
    KeyBalance kb;
    kb.key = k.at("key").get<std::string>();
    kb.coverage = k.at("coverage").get<double>();
    read_per_label(k.at("with_key"), kb.with_key);
    read_per_label(k.at("missing"), kb.missing);
    for (const auto& val : k.at("values")) {
      ValueBalance vb;
      vb.value = val.at("value").get<std::string>();
      read_per_label(val.at("set_count"), vb.set_count);
      read_per_label_opt(val.at("set_ratio"), vb.set_ratio);
      vb.full_count = val.at("full_count").get<std::size_t>();
      vb.full_ratio = val.at("full_ratio").get<double>();
      kb.values.push_back(std::move(vb));
    }
    v.keys.push_back(std::move(kb));
  }
  for (const auto& [m, counts] : j.at("maps").items()) read_per_label(counts, v.map_counts[m]);
}

void to_json(json& j, const CutReport& v) {
  json seqs = json::object();
  for (const auto& [seq, runs] : v.runs) {
    json list = json::array();
    for (const auto& r : runs) {
      list.push_back({{"set", std::string(to_string(r.set))}, {"first", r.first_id}, {"last", r.last_id}, {"count", r.count}});
    }
    seqs[seq] = std::move(list);
  }
  j = {{"cut_sequences", v.cut_sequences}, {"sequences", std::move(seqs)}};
}

void from_json(const json& j, CutReport& v) {
  v = CutReport{};
  v.cut_sequences = j.at("cut_sequences").get<std::size_t>();
  for (const auto& [seq, runs] : j.at("sequences").items()) {
    auto& out = v.runs[seq];
    for (const auto& r : runs) {
      out.push_back({label_from(r.at("set")), r.at("first").get<std::string>(), r.at("last").get<std::string>(),
                     r.at("count").get<std::size_t>()});
    }
  }
}

void to_json(json& j, const ValidationReport& v) {
  json checks = json::array();
  for (const auto& c : v.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"measured", opt(c.measured)}, {"bound", c.bound},
                      {"details", c.details}});
  }
  j = {{"passed", v.passed()}, {"checks", std::move(checks)}};
}

void to_json(json& j, const EvalReport& v) {
  json classes = json::array();
  for (const auto& c : v.classes) {
    json ap = json::array();
    for (std::size_t k = 0; k < c.ap.size(); ++k) ap.push_back({{"threshold", v.thresholds[k]}, {"ap", opt(c.ap[k])}});
    classes.push_back({{"class", std::string(to_string(c.cls))},
                       {"ap", std::move(ap)},
                       {"map", opt(c.map)},
                       {"gt_count", c.gt_count},
                       {"pred_count", c.pred_count}});
  }
  j = {{"thresholds", v.thresholds},       {"resample_interval", v.resample_interval},
       {"classes", std::move(classes)},    {"mean", opt(v.mean)},
       {"excluded", v.excluded},           {"frames", v.frames},
       {"gt_elements", v.gt_elements},     {"pred_elements", v.pred_elements}};
}

void from_json(const json& j, EvalReport& v) {
  v = EvalReport{};
  v.thresholds = j.at("thresholds").get<std::vector<double>>();
  v.resample_interval = j.at("resample_interval").get<double>();
  for (const auto& c : j.at("classes")) {
    ClassEval ce;
    ce.cls = class_from(c.at("class"));
    for (const auto& a : c.at("ap")) ce.ap.push_back(opt_get<double>(a.at("ap")));
    ce.map = opt_get<double>(c.at("map"));
    ce.gt_count = c.at("gt_count").get<std::size_t>();
    ce.pred_count = c.at("pred_count").get<std::size_t>();
    v.classes.push_back(std::move(ce));
  }
  v.mean = opt_get<double>(j.at("mean"));
  v.excluded = j.at("excluded").get<std::vector<std::string>>();
  v.frames = j.at("frames").get<std::size_t>();
  v.gt_elements = j.at("gt_elements").get<std::size_t>();
  v.pred_elements = j.at("pred_elements").get<std::size_t>();
}

void to_json(json& j, const IouReport& v) {
  json classes = json::object();
  for (std::size_t c = 0; c < 3; ++c) {
    classes[std::string(to_string(static_cast<ElementClass>(c)))] = {
        {"intersection", v.intersection[c]}, {"union", v.union_[c]}, {"iou", opt(v.iou[c])}};
  }
  j = {{"classes", std::move(classes)}, {"mean", opt(v.mean)}, {"frames", v.frames}};
}

json folds_report_json(const std::vector<FoldResult>& folds) {
  json arr = json::array();
  for (const auto& f : folds) {
    arr.push_back({{"name", f.spec.name},
                   {"train_maps", f.spec.train_maps},
                   {"val_maps", f.spec.val_maps},
                   {"train", f.train},
                   {"val", f.val},
                   {"unassigned", f.unassigned},
                   {"train_fraction", opt(f.train_fraction)}});
  }
  return json{{"folds", std::move(arr)}};
}

}  // namespace geosplit
