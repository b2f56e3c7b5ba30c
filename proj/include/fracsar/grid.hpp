#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fracsar {

/// Regular raster geometry. Spacing is in physical units per pixel.
struct GridSpec {
  int width = 0;
  int height = 0;
  double spacing = 1.0;

  /// Throws ConfigError unless width, height >= 8 and spacing > 0.
  void validate() const;
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  bool operator==(const GridSpec&) const = default;
};

/// A real-valued field sampled on a GridSpec, row-major. Every value is finite.
class FieldGrid {
 public:
  FieldGrid() = default;
  FieldGrid(GridSpec spec, std::vector<double> values);

  static FieldGrid constant(const GridSpec& spec, double value);

  const GridSpec& spec() const noexcept { return spec_; }
  int width() const noexcept { return spec_.width; }
  int height() const noexcept { return spec_.height; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<const double> values() const noexcept { return values_; }
  double operator()(int row, int col) const { return values_[index(row, col)]; }
  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(spec_.width) +
           static_cast<std::size_t>(col);
  }

 private:
  GridSpec spec_;
  std::vector<double> values_;
};

/// Row-major binary raster; nonzero bytes are "set".
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height, bool fill = false);
  BinaryMask(int width, int height, std::vector<std::uint8_t> bits);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return bits_.size(); }

  bool operator()(int row, int col) const { return bits_[index(row, col)] != 0; }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(int row, int col, bool v) { bits_[index(row, col)] = v ? 1 : 0; }
  void set(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }

  std::size_t count() const noexcept;
  bool empty_region() const noexcept { return count() == 0; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }
  bool operator==(const BinaryMask&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Filled axis-aligned ellipse, centre (cx, cy) and semi-axes (rx, ry) in pixels.
BinaryMask ellipse_mask(int width, int height, double cx, double cy, double rx, double ry);

/// Signed integer frequency index of DFT bin i for an axis of length n.
inline int signed_bin(int i, int n) noexcept { return i <= n / 2 ? i : i - n; }

/// Angular frequency step 2*pi/(n*spacing) in radians per physical unit.
double frequency_step(int n, double spacing) noexcept;

/// Radial frequency |omega| of bin (row, col). Computed as step*k per axis so
/// that doubling k doubles the result exactly.
double radial_frequency(const GridSpec& spec, int row, int col) noexcept;

/// |omega| for every bin of the full (height x width) spectrum, row-major.
std::vector<double> radial_frequency_grid(const GridSpec& spec);

double mean(std::span<const double> v);
/// Sample variance with divisor n.
double variance(std::span<const double> v);

}  // namespace fracsar

namespace fracsar {

/// Natural log of intensities clamped below at 1e-6.
FieldGrid log_transform(const FieldGrid& field);

}  // namespace fracsar
