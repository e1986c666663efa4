#include "geosplit/manifest.hpp"

#include <fstream>

#include "geosplit/error.hpp"
#include "geosplit/leakage.hpp"

namespace geosplit {

json split_manifest(const Dataset& ds, const SplitAssignment& split, const CutReport& cuts,
                    std::span<const InputDigest> inputs, std::string_view created) {
  const auto counts = split.counts(ds);
  const auto balance = balance_report(ds, split, ds.attribute_keys());

  json count_json = json::object();
  json proportions = json::object();
  for (SetLabel l : kAllLabels) count_json[std::string(to_string(l))] = counts[label_index(l)];
  for (SetLabel l : kSplitSets) {
    const auto& p = balance.proportions[label_index(l)];
    proportions[std::string(to_string(l))] = p ? json(*p) : json(nullptr);
  }

  json leakage = nullptr;
  if (counts[label_index(SetLabel::train)] > 0) {
    const double tau[] = {5.0};
    const auto report = audit(ds, split, tau);
    auto ratio = [](const SetLeakage& s) { return s.ratios[0] ? json(*s.ratios[0]) : json(nullptr); };
    leakage = {{"threshold", 5.0}, {"val", ratio(report.all.val)}, {"test", ratio(report.all.test)}};
  }

  json balance_summary = json::object();
  for (const auto& k : balance.keys) {
    double worst = 0.0;
    for (const auto& v : k.values) {
      for (SetLabel s : kSplitSets) {
        if (const auto& r = v.set_ratio[label_index(s)]) worst = std::max(worst, std::abs(*r - v.full_ratio));
      }
    }
    balance_summary[k.key] = {{"coverage", k.coverage}, {"max_deviation", worst}};
  }

  json input_json = json::array();
  for (const auto& d : inputs) input_json.push_back({{"name", d.path}, {"sha256", d.sha256}, {"bytes", d.bytes}});

  return {{"tool", std::string(kToolName)},
          {"tool_version", std::string(kToolVersion)},
          {"created", std::string(created)},
          {"provenance", split.provenance()},
          {"inputs", std::move(input_json)},
          {"samples", ds.size()},
          {"counts", std::move(count_json)},
          {"proportions", std::move(proportions)},
          {"leakage_5m", std::move(leakage)},
          {"balance", std::move(balance_summary)},
          {"cut_sequences", cuts.cut_sequences}};
}

SplitArtifacts make_split_artifacts(const Dataset& ds, const SplitAssignment& split, const CutReport& cuts,
                                    std::span<const InputDigest> inputs, std::string_view created) {
  return {split_csv_string(ds, split), canonical_dump(split_manifest(ds, split, cuts, inputs, created)),
          canonical_dump(json(cuts))};
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string(), path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorKind::io, "write failed for " + path.string(), path.string());
}

void write_split_artifacts(const std::filesystem::path& dir, const SplitArtifacts& artifacts) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message(), dir.string());
  write_text_file(dir / "split.csv", artifacts.split_csv);
  write_text_file(dir / "manifest.json", artifacts.manifest_json);
  write_text_file(dir / "cuts.json", artifacts.cuts_json);
}

}  // namespace geosplit
