#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geosplit/json_io.hpp"

namespace geosplit {

inline constexpr std::string_view kToolName = "geosplit";
inline constexpr std::string_view kToolVersion = "0.1.0";

std::string sha256_hex(std::string_view data);

struct InputDigest {
  std::string path;
  std::string sha256;
  std::uintmax_t bytes = 0;

  friend bool operator==(const InputDigest&, const InputDigest&) = default;
};

/// Hashes a file; `path` is recorded as given unless `name_only`, which keeps
/// just the file name. Throws io-error.
InputDigest digest_file(const std::filesystem::path& path, bool name_only = false);
InputDigest digest_bytes(std::string name, std::string_view bytes);

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

/// Any subset of the audit/evaluation outputs.
struct ReportParts {
  std::optional<LeakageReport> leakage;
  std::optional<std::vector<CurvePoint>> curve;
  std::optional<BalanceReport> balance;
  std::optional<CellHistogram> histogram;
  std::optional<EvalReport> eval;

  std::size_t section_count() const;
  friend bool operator==(const ReportParts&, const ReportParts&) = default;
};

/// Re-checks each embedded report's own invariants; throws invalid-argument
/// naming the first violation.
void check_report_invariants(const ReportParts& parts);

struct ReportBundle {
  std::string tool_version{kToolVersion};
  std::string created;
  std::vector<InputDigest> inputs;
  ReportParts parts;
};

/// Assembles a bundle, hashing `inputs` (throws io-error) and checking invariants.
ReportBundle bundle(ReportParts parts, std::span<const std::filesystem::path> inputs, std::string created);

json bundle_json(const ReportBundle& b);
ReportBundle bundle_from_json(const json& j);
std::string bundle_string(const ReportBundle& b);

struct VerifyResult {
  bool ok = true;
  std::vector<std::string> problems;
};

/// Re-hashes every input of the bundle; relative paths resolve against `base`.
VerifyResult verify_bundle(const ReportBundle& b, const std::filesystem::path& base = {});

// Tidy CSV series, one observation per row, fixed column order. Missing ratios
// are empty fields.

/// set,threshold,ratio (val rows first, then test).
std::string curve_csv(std::span<const CurvePoint> curve);
/// set,threshold,ratio
std::string leakage_csv(const LeakageReport& report);
/// count,cells
std::string marginal_csv(const CellHistogram& h);
/// map_id,i,j,count
std::string histogram_cells_csv(const CellHistogram& h);
/// class,threshold,ap
std::string eval_csv(const EvalReport& report);
/// key,value,set,ratio,full_ratio
std::string balance_csv(const BalanceReport& report);

}  // namespace geosplit
