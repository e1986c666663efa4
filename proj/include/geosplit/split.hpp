#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geosplit/ingest.hpp"
#include "geosplit/regions.hpp"
#include "geosplit/split_assignment.hpp"

namespace geosplit {

enum class AssignMode { per_sample, per_sequence };

std::string_view to_string(AssignMode m);
std::optional<AssignMode> parse_assign_mode(std::string_view s);

/// A maximal run of consecutive (time-ordered) samples of one sequence sharing a label.
struct Run {
  SetLabel set = SetLabel::unassigned;
  std::string first_id;
  std::string last_id;
  std::size_t count = 0;

  friend bool operator==(const Run&, const Run&) = default;
};

struct CutReport {
  std::map<std::string, std::vector<Run>> runs;  // by sequence id
  std::size_t cut_sequences = 0;                 // sequences with more than one run

  friend bool operator==(const CutReport&, const CutReport&) = default;
};

/// Runs of every sequence under `split` (missing labels read as unassigned).
CutReport cut_report(const Dataset& ds, const SplitAssignment& split);

struct AssignResult {
  SplitAssignment split;
  CutReport cuts;
};

/// Label of the highest-priority region containing (x, y) on `map_id`.
SetLabel region_label(const RegionSet& regions, const std::string& map_id, const Point2& p);

/// per_sample: every sample takes the target of the highest-priority region
/// containing it (unassigned outside all regions). per_sequence: each sequence
/// takes the majority of its per-sample labels, ties resolved in the order
/// train, val, test, unassigned.
AssignResult assign_by_regions(const Dataset& ds, const RegionSet& regions, AssignMode mode);

struct ValueBalance {
  std::string value;
  std::array<std::size_t, 4> set_count{};                 // samples with key == value, per label
  std::array<std::optional<double>, 4> set_ratio{};        // among samples of that label having the key
  std::size_t full_count = 0;
  double full_ratio = 0.0;

  friend bool operator==(const ValueBalance&, const ValueBalance&) = default;
};

struct KeyBalance {
  std::string key;
  double coverage = 0.0;                      // fraction of all samples carrying the key
  std::array<std::size_t, 4> with_key{};
  std::array<std::size_t, 4> missing{};
  std::vector<ValueBalance> values;           // sorted by value; empty when coverage is 0

  friend bool operator==(const KeyBalance&, const KeyBalance&) = default;
};

struct BalanceReport {
  std::array<std::size_t, 4> set_counts{};
  /// train/val/test share of assigned samples; none when nothing is assigned.
  std::array<std::optional<double>, 3> proportions{};
  std::vector<KeyBalance> keys;
  std::map<std::string, std::array<std::size_t, 4>> map_counts;

  /// Largest |set ratio - full ratio| over train/val/test and all values.
  double max_deviation() const;

  friend bool operator==(const BalanceReport&, const BalanceReport&) = default;
};

/// Samples the split does not label are counted as unassigned.
BalanceReport balance_report(const Dataset& ds, const SplitAssignment& split,
                             std::span<const std::string> attribute_keys);

struct FoldSpec {
  std::string name;
  std::vector<std::string> train_maps;
  std::vector<std::string> val_maps;

  friend bool operator==(const FoldSpec&, const FoldSpec&) = default;
};

struct FoldResult {
  FoldSpec spec;
  SplitAssignment split;
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t unassigned = 0;
  std::optional<double> train_fraction;  // train / (train + val)
};

/// Built-in city-wise fold definitions: "nuscenes" (folds A, B) and
/// "argoverse2" (folds A, B, C). Throws invalid-argument for other names.
std::vector<FoldSpec> fold_preset(std::string_view name);
std::vector<std::string> fold_preset_names();

std::vector<FoldSpec> parse_folds(std::string_view json_text);
std::string folds_json_string(std::span<const FoldSpec> folds);

/// Throws overlapping-maps(fold) or unknown-map(map).
std::vector<FoldResult> citywise_folds(const Dataset& ds, std::span<const FoldSpec> folds);

struct ValidationOptions {
  double leak_threshold = 5.0;
  double leak_bound = 0.02;
  std::array<double, 3> targets{0.70, 0.15, 0.15};
  double proportion_tolerance = 0.02;
  double balance_tolerance = 0.05;
  /// Empty means every attribute key present in the dataset.
  std::vector<std::string> attribute_keys;
};

struct ValidationCheck {
  std::string name;
  bool passed = false;
  std::optional<double> measured;
  double bound = 0.0;
  std::vector<std::string> details;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool passed() const;
  const ValidationCheck* find(std::string_view name) const;
};

/// Checks: totality, disjointness (leakage at leak_threshold <= leak_bound),
/// proportions, balance, and, when regions are given, consistency with the
/// per-sample region assignment. Never throws on a failing split.
ValidationReport validate_split(const Dataset& ds, const SplitAssignment& split, const RegionSet* regions,
                                const ValidationOptions& options = {});

}  // namespace geosplit
