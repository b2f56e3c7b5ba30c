#include "fracsar/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fracsar/error.hpp"

namespace fracsar {

void GridSpec::validate() const {
  if (width < 8 || height < 8) {
    throw ConfigError("grid must be at least 8x8, got " + std::to_string(width) + "x" +
                      std::to_string(height));
  }
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw ConfigError("grid spacing must be positive");
  }
}

FieldGrid::FieldGrid(GridSpec spec, std::vector<double> values)
    : spec_(spec), values_(std::move(values)) {
  spec_.validate();
  if (values_.size() != spec_.pixel_count()) {
    throw DimensionError("field has " + std::to_string(values_.size()) + " values, grid needs " +
                         std::to_string(spec_.pixel_count()));
  }
  if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); })) {
    throw DataError("field contains non-finite values");
  }
}

FieldGrid FieldGrid::constant(const GridSpec& spec, double value) {
  return FieldGrid(spec, std::vector<double>(spec.pixel_count(), value));
}

BinaryMask::BinaryMask(int width, int height, bool fill)
    : width_(width),
      height_(height),
      bits_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
            fill ? 1 : 0) {}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  if (bits_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw DimensionError("mask size does not match its dimensions");
  }
  for (auto& b : bits_) b = b ? 1 : 0;
}

std::size_t BinaryMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

BinaryMask ellipse_mask(int width, int height, double cx, double cy, double rx, double ry) {
  BinaryMask m(width, height);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const double dx = (c - cx) / rx;
      const double dy = (r - cy) / ry;
      m.set(r, c, dx * dx + dy * dy <= 1.0);
    }
  }
  return m;
}

double frequency_step(int n, double spacing) noexcept {
  return 2.0 * std::numbers::pi / (static_cast<double>(n) * spacing);
}

double radial_frequency(const GridSpec& spec, int row, int col) noexcept {
  const double wy = frequency_step(spec.height, spec.spacing) * signed_bin(row, spec.height);
  const double wx = frequency_step(spec.width, spec.spacing) * signed_bin(col, spec.width);
  return std::sqrt(wx * wx + wy * wy);
}

std::vector<double> radial_frequency_grid(const GridSpec& spec) {
  std::vector<double> out(spec.pixel_count());
  std::size_t i = 0;
  for (int r = 0; r < spec.height; ++r) {
    for (int c = 0; c < spec.width; ++c) out[i++] = radial_frequency(spec, r, c);
  }
  return out;
}

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double variance(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

}  // namespace fracsar

namespace fracsar {

FieldGrid log_transform(const FieldGrid& field) {
  std::vector<double> out(field.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::log(std::max(field.values()[i], 1e-6));
  return FieldGrid(field.spec(), std::move(out));
}

}  // namespace fracsar
