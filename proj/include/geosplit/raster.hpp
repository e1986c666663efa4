#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "geosplit/ingest.hpp"

namespace geosplit {

/// Bird's-eye-view raster window in frame coordinates. Defaults: 60 m x 30 m,
/// 0.15 m pixels, 0.5 m line half-width.
struct RasterSpec {
  double x_min = -30.0;
  double x_max = 30.0;
  double y_min = -15.0;
  double y_max = 15.0;
  double resolution = 0.15;
  double half_width = 0.5;

  /// Throws invalid-argument.
  void validate() const;
  std::size_t width() const;
  std::size_t height() const;
};

class Mask {
 public:
  Mask() = default;
  Mask(std::size_t width, std::size_t height) : width_(width), height_(height), bits_(width * height, 0) {}

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  bool at(std::size_t col, std::size_t row) const { return bits_[row * width_ + col] != 0; }
  void set(std::size_t col, std::size_t row) { bits_[row * width_ + col] = 1; }
  std::size_t count() const;
  std::span<const std::uint8_t> bits() const { return bits_; }

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// One mask per class (divider, boundary, crossing order). Pixel (col, row)
/// covers x_min + col*res .. x_min + (col+1)*res; a pixel is set when its centre
/// lies within half_width of a polyline. Geometry outside the window is clipped.
std::array<Mask, 3> rasterize(std::span<const MapElement> elements, const RasterSpec& spec);

/// |a and b| / |a or b|, 1.0 for two empty masks. Throws shape-mismatch.
double iou(const Mask& a, const Mask& b);

struct IouReport {
  std::array<std::size_t, 3> intersection{};
  std::array<std::size_t, 3> union_{};
  std::array<std::optional<double>, 3> iou{};  // none when the class never appears
  std::optional<double> mean;
  std::size_t frames = 0;
};

/// Dataset-level IoU per class (summed intersections over summed unions).
IouReport evaluate_iou(const FrameElements& preds, const FrameElements& gts, const RasterSpec& spec = {});

}  // namespace geosplit
