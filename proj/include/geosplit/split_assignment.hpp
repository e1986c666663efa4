#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "geosplit/ingest.hpp"

namespace geosplit {

enum class SetLabel { train, val, test, unassigned };

inline constexpr std::array<SetLabel, 4> kAllLabels = {SetLabel::train, SetLabel::val, SetLabel::test,
                                                       SetLabel::unassigned};
inline constexpr std::array<SetLabel, 3> kSplitSets = {SetLabel::train, SetLabel::val, SetLabel::test};

std::string_view to_string(SetLabel s);
std::optional<SetLabel> parse_set_label(std::string_view s);
inline std::size_t label_index(SetLabel s) { return static_cast<std::size_t>(s); }

/// sample id -> set label. May be partial while being built or when loaded from
/// an incomplete file; `aligned` enforces totality against a dataset.
class SplitAssignment {
 public:
  SplitAssignment() = default;
  explicit SplitAssignment(std::string provenance) : provenance_(std::move(provenance)) {}

  /// Total assignment from labels aligned with dataset positions.
  static SplitAssignment from_labels(const Dataset& ds, std::span<const SetLabel> labels, std::string provenance);

  void set(const std::string& id, SetLabel label) { labels_[id] = label; }
  std::optional<SetLabel> get(const std::string& id) const;
  std::size_t size() const { return labels_.size(); }
  const std::unordered_map<std::string, SetLabel>& entries() const { return labels_; }

  const std::string& provenance() const { return provenance_; }
  void set_provenance(std::string p) { provenance_ = std::move(p); }

  /// Dataset samples lacking a label, in dataset order.
  std::vector<std::string> missing(const Dataset& ds) const;
  /// Labelled ids that are not dataset samples, sorted.
  std::vector<std::string> extraneous(const Dataset& ds) const;

  /// Labels aligned with dataset positions. Throws unknown-sample-id naming the
  /// first unlabelled sample.
  std::vector<SetLabel> aligned(const Dataset& ds) const;

  /// Counts per label over dataset samples (indexed by label_index).
  std::array<std::size_t, 4> counts(const Dataset& ds) const;

  friend bool operator==(const SplitAssignment& a, const SplitAssignment& b) { return a.labels_ == b.labels_; }

 private:
  std::unordered_map<std::string, SetLabel> labels_;
  std::string provenance_;
};

/// split.csv: header `sample_id,set`, one row per sample.
SplitAssignment load_split_csv(const std::filesystem::path& path);
SplitAssignment parse_split_csv(std::istream& in);
/// Rows in dataset order; the split must be total over `ds`.
void write_split_csv(std::ostream& out, const Dataset& ds, const SplitAssignment& split);
std::string split_csv_string(const Dataset& ds, const SplitAssignment& split);

}  // namespace geosplit
