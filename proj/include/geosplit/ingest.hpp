#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "geosplit/geometry.hpp"

namespace geosplit {

/// One timestamped vehicle pose. x/y are meters in the planar frame of `map_id`;
/// `t` is microseconds since epoch.
struct Sample {
  std::string id;
  std::string sequence_id;
  std::string map_id;
  double x = 0.0;
  double y = 0.0;
  std::int64_t t = 0;
  bool keyframe = false;
  std::map<std::string, std::string> attrs;

  Point2 position() const { return {x, y}; }
  friend bool operator==(const Sample&, const Sample&) = default;
};

/// Immutable, validated sample collection with a derived sequence index.
class Dataset {
 public:
  Dataset() = default;

  /// Validates unique ids, finite coordinates, strictly increasing t per
  /// sequence (in collection order) and a single map per sequence.
  /// `source_lines`, when given, maps sample positions to input lines for
  /// error messages.
  explicit Dataset(std::vector<Sample> samples, std::span<const std::size_t> source_lines = {});

  std::span<const Sample> samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }

  std::optional<std::size_t> index_of(std::string_view id) const;
  /// Throws unknown-sample-id.
  std::size_t require_index(std::string_view id) const;

  /// sequence_id -> sample positions in time order.
  const std::map<std::string, std::vector<std::size_t>>& sequences() const { return sequences_; }
  const std::set<std::string>& maps() const { return maps_; }
  /// Union of attribute keys over all samples, sorted.
  std::vector<std::string> attribute_keys() const;

  friend bool operator==(const Dataset& a, const Dataset& b) { return a.samples_ == b.samples_; }

 private:
  std::vector<Sample> samples_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::map<std::string, std::vector<std::size_t>> sequences_;
  std::set<std::string> maps_;
};

enum class SampleFormat { jsonl, csv };

/// Picks the format from the file extension (.csv -> csv, otherwise jsonl).
SampleFormat sample_format_for(const std::filesystem::path& path);

Dataset load_samples(const std::filesystem::path& path, SampleFormat format);
Dataset parse_samples(std::istream& in, SampleFormat format);
void write_samples(std::ostream& out, const Dataset& ds, SampleFormat format);

struct ResampleMode {
  enum class Kind { keyframes_only, every_nth, all };
  Kind kind = Kind::all;
  std::size_t n = 1;

  static ResampleMode keyframes_only() { return {Kind::keyframes_only, 1}; }
  static ResampleMode every_nth(std::size_t n) { return {Kind::every_nth, n}; }
  static ResampleMode all() { return {Kind::all, 1}; }
};

/// Density resampling. every_nth keeps the 1st, (n+1)th, (2n+1)th ... sample of
/// each sequence in time order; relative order of kept samples is preserved.
Dataset resample_sequences(const Dataset& ds, ResampleMode mode);

enum class ElementClass { divider, boundary, crossing };

inline constexpr ElementClass kElementClasses[] = {ElementClass::divider, ElementClass::boundary,
                                                   ElementClass::crossing};

std::string_view to_string(ElementClass c);
std::optional<ElementClass> parse_element_class(std::string_view s);

/// A class-labelled polyline in frame-local coordinates. Predictions carry a
/// confidence in [0, 1]; ground truth does not.
struct MapElement {
  std::string frame_id;
  ElementClass cls = ElementClass::divider;
  std::vector<Point2> points;
  std::optional<double> confidence;

  friend bool operator==(const MapElement&, const MapElement&) = default;
};

/// Elements grouped by frame_id; within a frame, input order is preserved.
using FrameElements = std::map<std::string, std::vector<MapElement>>;

/// Throws degenerate-polyline / parse-error when the element breaks an invariant.
void validate_element(const MapElement& e, std::size_t line = 0);

FrameElements load_map_elements(const std::filesystem::path& path, bool require_confidence);
FrameElements parse_map_elements(std::istream& in, bool require_confidence);
void write_map_elements(std::ostream& out, const FrameElements& elements);

}  // namespace geosplit
