#include "geosplit/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "geosplit/error.hpp"
#include "geosplit/text.hpp"

namespace geosplit {

using nlohmann::json;

Dataset::Dataset(std::vector<Sample> samples, std::span<const std::size_t> source_lines)
    : samples_(std::move(samples)) {
  auto line_of = [&](std::size_t i) { return i < source_lines.size() ? source_lines[i] : 0; };
  by_id_.reserve(samples_.size());
  std::unordered_map<std::string, std::size_t> last_in_sequence;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const Sample& s = samples_[i];
    if (!std::isfinite(s.x) || !std::isfinite(s.y)) {
      throw Error(ErrorKind::parse, "non-finite coordinate in sample " + s.id, "x/y", line_of(i));
    }
    if (!by_id_.emplace(s.id, i).second) {
      throw Error(ErrorKind::duplicate_id, "sample id appears more than once", s.id, line_of(i));
    }
    auto [it, fresh] = last_in_sequence.try_emplace(s.sequence_id, i);
    if (!fresh) {
      const Sample& prev = samples_[it->second];
      if (prev.map_id != s.map_id) {
        throw Error(ErrorKind::parse,
                    "sequence " + s.sequence_id + " spans maps " + prev.map_id + " and " + s.map_id,
                    "map_id", line_of(i));
      }
      if (s.t <= prev.t) {
        throw Error(ErrorKind::non_monotone_time, "timestamps must strictly increase",
                    s.sequence_id, line_of(i));
      }
      it->second = i;
    }
    sequences_[s.sequence_id].push_back(i);
    maps_.insert(s.map_id);
  }
}

std::optional<std::size_t> Dataset::index_of(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::size_t Dataset::require_index(std::string_view id) const {
  if (auto i = index_of(id)) return *i;
  throw Error(ErrorKind::unknown_sample_id, "sample not in dataset", std::string(id));
}

std::vector<std::string> Dataset::attribute_keys() const {
  std::set<std::string> keys;
  for (const auto& s : samples_) {
    for (const auto& [k, v] : s.attrs) keys.insert(k);
  }
  return {keys.begin(), keys.end()};
}

SampleFormat sample_format_for(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".csv" ? SampleFormat::csv : SampleFormat::jsonl;
}

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string(), path.string());
  return in;
}

bool blank(std::string_view line) {
  return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

const json& require_field(const json& rec, const char* field, std::size_t line) {
  auto it = rec.find(field);
  if (it == rec.end()) throw Error(ErrorKind::parse, "missing required field", field, line);
  return *it;
}

std::string require_string(const json& rec, const char* field, std::size_t line) {
  const json& v = require_field(rec, field, line);
  if (!v.is_string()) throw Error(ErrorKind::parse, "expected a string", field, line);
  return v.get<std::string>();
}

double require_number(const json& rec, const char* field, std::size_t line) {
  const json& v = require_field(rec, field, line);
  if (!v.is_number()) throw Error(ErrorKind::parse, "expected a number", field, line);
  return v.get<double>();
}

Sample sample_from_json(const json& rec, std::size_t line) {
  if (!rec.is_object()) throw Error(ErrorKind::parse, "record is not an object", "", line);
  Sample s;
  s.id = require_string(rec, "id", line);
  s.sequence_id = require_string(rec, "sequence_id", line);
  s.map_id = require_string(rec, "map_id", line);
  s.x = require_number(rec, "x", line);
  s.y = require_number(rec, "y", line);
  const json& t = require_field(rec, "t", line);
  if (!t.is_number_integer()) throw Error(ErrorKind::parse, "expected an integer", "t", line);
  s.t = t.get<std::int64_t>();
  const json& kf = require_field(rec, "keyframe", line);
  if (!kf.is_boolean()) throw Error(ErrorKind::parse, "expected a boolean", "keyframe", line);
  s.keyframe = kf.get<bool>();
  const json& attrs = require_field(rec, "attrs", line);
  if (!attrs.is_object()) throw Error(ErrorKind::parse, "expected an object", "attrs", line);
  for (const auto& [k, v] : attrs.items()) {
    if (!v.is_string()) throw Error(ErrorKind::parse, "attribute values must be strings", "attrs." + k, line);
    s.attrs.emplace(k, v.get<std::string>());
  }
  return s;
}

json sample_to_json(const Sample& s) {
  json attrs = json::object();
  for (const auto& [k, v] : s.attrs) attrs[k] = v;
  return json{{"id", s.id},     {"sequence_id", s.sequence_id}, {"map_id", s.map_id},
              {"x", s.x},       {"y", s.y},                     {"t", s.t},
              {"keyframe", s.keyframe}, {"attrs", std::move(attrs)}};
}

constexpr const char* kCsvFixed[] = {"id", "sequence_id", "map_id", "x", "y", "t", "keyframe"};
constexpr std::size_t kCsvFixedCount = std::size(kCsvFixed);

Dataset parse_jsonl(std::istream& in) {
  std::vector<Sample> samples;
  std::vector<std::size_t> lines;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::parse, e.what(), "", lineno);
    }
    samples.push_back(sample_from_json(rec, lineno));
    lines.push_back(lineno);
  }
  return Dataset(std::move(samples), lines);
}

Dataset parse_csv(std::istream& in) {
  std::vector<Sample> samples;
  std::vector<std::size_t> lines;
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    auto fields = split_csv_record(line);
    if (!fields) throw Error(ErrorKind::parse, "unterminated quote", "", lineno);
    if (header.empty()) {
      header = std::move(*fields);
      if (header.size() < kCsvFixedCount) {
        throw Error(ErrorKind::parse, "header must start with id,sequence_id,map_id,x,y,t,keyframe", "header", lineno);
      }
      for (std::size_t i = 0; i < kCsvFixedCount; ++i) {
        if (header[i] != kCsvFixed[i]) {
          throw Error(ErrorKind::parse, "unexpected header column '" + header[i] + "'", kCsvFixed[i], lineno);
        }
      }
      std::set<std::string> seen;
      for (std::size_t i = kCsvFixedCount; i < header.size(); ++i) {
        if (header[i].empty() || !seen.insert(header[i]).second) {
          throw Error(ErrorKind::parse, "attribute columns must be named and unique", header[i], lineno);
        }
      }
      continue;
    }
    if (fields->size() != header.size()) {
      throw Error(ErrorKind::parse,
                  "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(fields->size()),
                  "", lineno);
    }
    const auto& f = *fields;
    Sample s;
    s.id = f[0];
    s.sequence_id = f[1];
    s.map_id = f[2];
    if (s.id.empty()) throw Error(ErrorKind::parse, "empty id", "id", lineno);
    auto x = parse_double(f[3]);
    if (!x) throw Error(ErrorKind::parse, "expected a number", "x", lineno);
    auto y = parse_double(f[4]);
    if (!y) throw Error(ErrorKind::parse, "expected a number", "y", lineno);
    auto t = parse_int64(f[5]);
    if (!t) throw Error(ErrorKind::parse, "expected an integer", "t", lineno);
    if (f[6] != "true" && f[6] != "false") throw Error(ErrorKind::parse, "expected true or false", "keyframe", lineno);
    s.x = *x;
    s.y = *y;
    s.t = *t;
    s.keyframe = f[6] == "true";
    for (std::size_t i = kCsvFixedCount; i < f.size(); ++i) {
      if (!f[i].empty()) s.attrs.emplace(header[i], f[i]);
    }
    samples.push_back(std::move(s));
    lines.push_back(lineno);
  }
  return Dataset(std::move(samples), lines);
}

}  // namespace

Dataset load_samples(const std::filesystem::path& path, SampleFormat format) {
  auto in = open_input(path);
  return parse_samples(in, format);
}

Dataset parse_samples(std::istream& in, SampleFormat format) {
  return format == SampleFormat::csv ? parse_csv(in) : parse_jsonl(in);
}

void write_samples(std::ostream& out, const Dataset& ds, SampleFormat format) {
  if (format == SampleFormat::jsonl) {
    for (const auto& s : ds.samples()) out << sample_to_json(s).dump() << '\n';
    return;
  }
  const auto keys = ds.attribute_keys();
  for (std::size_t i = 0; i < kCsvFixedCount; ++i) out << (i ? "," : "") << kCsvFixed[i];
  for (const auto& k : keys) out << ',' << csv_field(k);
  out << '\n';
  for (const auto& s : ds.samples()) {
    out << csv_field(s.id) << ',' << csv_field(s.sequence_id) << ',' << csv_field(s.map_id) << ','
        << format_double(s.x) << ',' << format_double(s.y) << ',' << s.t << ','
        << (s.keyframe ? "true" : "false");
    for (const auto& k : keys) {
      out << ',';
      if (auto it = s.attrs.find(k); it != s.attrs.end()) out << csv_field(it->second);
    }
    out << '\n';
  }
}

Dataset resample_sequences(const Dataset& ds, ResampleMode mode) {
  if (mode.kind == ResampleMode::Kind::every_nth && mode.n < 1) {
    throw Error(ErrorKind::invalid_argument, "every_nth requires n >= 1");
  }
  if (mode.kind == ResampleMode::Kind::all) return ds;
  std::vector<bool> keep(ds.size(), false);
  if (mode.kind == ResampleMode::Kind::keyframes_only) {
    for (std::size_t i = 0; i < ds.size(); ++i) keep[i] = ds[i].keyframe;
  } else {
    for (const auto& [seq, members] : ds.sequences()) {
      for (std::size_t k = 0; k < members.size(); k += mode.n) keep[members[k]] = true;
    }
  }
  std::vector<Sample> kept;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (keep[i]) kept.push_back(ds[i]);
  }
  return Dataset(std::move(kept));
}

std::string_view to_string(ElementClass c) {
  switch (c) {
    case ElementClass::divider: return "divider";
    case ElementClass::boundary: return "boundary";
    case ElementClass::crossing: return "crossing";
  }
  return "divider";
}

std::optional<ElementClass> parse_element_class(std::string_view s) {
  for (ElementClass c : kElementClasses) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

void validate_element(const MapElement& e, std::size_t line) {
  if (e.points.size() < 2) {
    throw Error(ErrorKind::degenerate_polyline, "polyline needs at least 2 points", e.frame_id, line);
  }
  for (std::size_t i = 0; i < e.points.size(); ++i) {
    const auto& p = e.points[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorKind::parse, "non-finite polyline coordinate", "points", line);
    }
    if (i > 0 && p == e.points[i - 1]) {
      throw Error(ErrorKind::degenerate_polyline, "consecutive duplicate points", e.frame_id, line);
    }
  }
  if (e.confidence && !(*e.confidence >= 0.0 && *e.confidence <= 1.0)) {
    throw Error(ErrorKind::parse, "confidence must lie in [0, 1]", "confidence", line);
  }
}

FrameElements load_map_elements(const std::filesystem::path& path, bool require_confidence) {
  auto in = open_input(path);
  return parse_map_elements(in, require_confidence);
}

FrameElements parse_map_elements(std::istream& in, bool require_confidence) {
  FrameElements out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::parse, e.what(), "", lineno);
    }
    if (!rec.is_object()) throw Error(ErrorKind::parse, "record is not an object", "", lineno);
    MapElement e;
    e.frame_id = require_string(rec, "frame_id", lineno);
    const auto cls = parse_element_class(require_string(rec, "class", lineno));
    if (!cls) throw Error(ErrorKind::parse, "class must be divider, boundary or crossing", "class", lineno);
    e.cls = *cls;
    const json& pts = require_field(rec, "points", lineno);
    if (!pts.is_array()) throw Error(ErrorKind::parse, "expected an array of [x,y]", "points", lineno);
    for (const auto& p : pts) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
        throw Error(ErrorKind::parse, "expected [x,y] pairs", "points", lineno);
      }
      e.points.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    if (auto c = rec.find("confidence"); c != rec.end() && !c->is_null()) {
      if (!c->is_number()) throw Error(ErrorKind::parse, "expected a number", "confidence", lineno);
      e.confidence = c->get<double>();
    } else if (require_confidence) {
      throw Error(ErrorKind::missing_confidence, "prediction lacks a confidence", e.frame_id, lineno);
    }
    validate_element(e, lineno);
    auto& group = out[e.frame_id];
    group.push_back(std::move(e));
  }
  return out;
}

void write_map_elements(std::ostream& out, const FrameElements& elements) {
  for (const auto& [frame, group] : elements) {
    for (const auto& e : group) {
      json pts = json::array();
      for (const auto& p : e.points) pts.push_back({p.x, p.y});
      json rec{{"frame_id", e.frame_id}, {"class", std::string(to_string(e.cls))}, {"points", std::move(pts)}};
      if (e.confidence) rec["confidence"] = *e.confidence;
      out << rec.dump() << '\n';
    }
  }
}

}  // namespace geosplit
