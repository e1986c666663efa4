#include "geosplit/split_assignment.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "geosplit/error.hpp"
#include "geosplit/text.hpp"

namespace geosplit {

std::string_view to_string(SetLabel s) {
  switch (s) {
    case SetLabel::train: return "train";
    case SetLabel::val: return "val";
    case SetLabel::test: return "test";
    case SetLabel::unassigned: return "unassigned";
  }
  return "unassigned";
}

std::optional<SetLabel> parse_set_label(std::string_view s) {
  for (SetLabel l : kAllLabels) {
    if (to_string(l) == s) return l;
  }
  return std::nullopt;
}

SplitAssignment SplitAssignment::from_labels(const Dataset& ds, std::span<const SetLabel> labels,
                                             std::string provenance) {
  if (labels.size() != ds.size()) {
    throw Error(ErrorKind::invalid_argument, "label count does not match dataset size");
  }
  SplitAssignment out(std::move(provenance));
  out.labels_.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) out.labels_.emplace(ds[i].id, labels[i]);
  return out;
}

std::optional<SetLabel> SplitAssignment::get(const std::string& id) const {
  auto it = labels_.find(id);
  if (it == labels_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> SplitAssignment::missing(const Dataset& ds) const {
  std::vector<std::string> out;
  for (const auto& s : ds.samples()) {
    if (!labels_.count(s.id)) out.push_back(s.id);
  }
  return out;
}

std::vector<std::string> SplitAssignment::extraneous(const Dataset& ds) const {
  std::vector<std::string> out;
  for (const auto& [id, label] : labels_) {
    if (!ds.index_of(id)) out.push_back(id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<SetLabel> SplitAssignment::aligned(const Dataset& ds) const {
  std::vector<SetLabel> out(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto it = labels_.find(ds[i].id);
    if (it == labels_.end()) {
      throw Error(ErrorKind::unknown_sample_id, "split has no label for sample", ds[i].id);
    }
    out[i] = it->second;
  }
  return out;
}

std::array<std::size_t, 4> SplitAssignment::counts(const Dataset& ds) const {
  std::array<std::size_t, 4> out{};
  for (const auto& s : ds.samples()) {
    if (auto it = labels_.find(s.id); it != labels_.end()) ++out[label_index(it->second)];
  }
  return out;
}

SplitAssignment load_split_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string(), path.string());
  auto split = parse_split_csv(in);
  split.set_provenance("file:" + path.filename().string());
  return split;
}

SplitAssignment parse_split_csv(std::istream& in) {
  SplitAssignment out("csv");
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fields = split_csv_record(line);
    if (!fields) throw Error(ErrorKind::parse, "unterminated quote", "", lineno);
    if (!header) {
      if (fields->size() != 2 || (*fields)[0] != "sample_id" || (*fields)[1] != "set") {
        throw Error(ErrorKind::parse, "header must be sample_id,set", "header", lineno);
      }
      header = true;
      continue;
    }
    if (fields->size() != 2) throw Error(ErrorKind::parse, "expected 2 fields", "", lineno);
    auto label = parse_set_label((*fields)[1]);
    if (!label) throw Error(ErrorKind::parse, "set must be train, val, test or unassigned", "set", lineno);
    if (out.get((*fields)[0])) throw Error(ErrorKind::duplicate_id, "sample listed twice", (*fields)[0], lineno);
    out.set((*fields)[0], *label);
  }
  return out;
}

void write_split_csv(std::ostream& out, const Dataset& ds, const SplitAssignment& split) {
  const auto labels = split.aligned(ds);
  out << "sample_id,set\n";
  for (std::size_t i = 0; i < ds.size(); ++i) out << csv_field(ds[i].id) << ',' << to_string(labels[i]) << '\n';
}

std::string split_csv_string(const Dataset& ds, const SplitAssignment& split) {
  std::ostringstream os;
  write_split_csv(os, ds, split);
  return os.str();
}

}  // namespace geosplit
