#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "geosplit/report.hpp"
#include "geosplit/split.hpp"

namespace geosplit {

/// Summary written next to every split: proportions, 5 m leakage, balance
/// summary, cut count, tool version and input digests.
json split_manifest(const Dataset& ds, const SplitAssignment& split, const CutReport& cuts,
                    std::span<const InputDigest> inputs, std::string_view created);

/// Everything `assign` writes, as bytes.
struct SplitArtifacts {
  std::string split_csv;
  std::string manifest_json;
  std::string cuts_json;
};

SplitArtifacts make_split_artifacts(const Dataset& ds, const SplitAssignment& split, const CutReport& cuts,
                                    std::span<const InputDigest> inputs, std::string_view created);

/// Writes split.csv, manifest.json and cuts.json into `dir` (created if needed).
void write_split_artifacts(const std::filesystem::path& dir, const SplitArtifacts& artifacts);

void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace geosplit
