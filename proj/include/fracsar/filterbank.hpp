#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fracsar/grid.hpp"

namespace fracsar {

enum class KernelFamily {
  /// Isotropic Laplacian-of-Gaussian: (s|w|)^2 exp(-(s|w|)^2 / 2).
  LaplacianOfGaussian,
};

std::string to_string(KernelFamily family);
/// Accepts "log" and "laplacian-of-gaussian"; throws ConfigError otherwise.
KernelFamily parse_kernel_family(std::string_view name);

/// Real, nonnegative frequency response sampled on the full DFT grid of a
/// GridSpec. Immutable once built.
class WaveletKernel {
 public:
  WaveletKernel(GridSpec spec, KernelFamily family, double scale, double gain);

  const GridSpec& spec() const noexcept { return spec_; }
  KernelFamily family() const noexcept { return family_; }
  /// Physical-unit scale s.
  double scale() const noexcept { return scale_; }
  /// Amplitude factor in front of the base family (1 for base kernels, 4 per dilation).
  double gain() const noexcept { return gain_; }
  /// Response samples, full height x width spectrum, row-major.
  std::span<const double> response() const noexcept { return response_; }
  double response(int row, int col) const {
    return response_[static_cast<std::size_t>(row) * spec_.width + col];
  }

  /// Closed-form response at radial frequency omega (rad per physical unit).
  double evaluate(double omega) const noexcept;

 private:
  GridSpec spec_;
  KernelFamily family_;
  double scale_;
  double gain_;
  std::vector<double> response_;
};

/// Base-family closed form at dimensionless argument x = s|w|.
double log_profile(double x) noexcept;

/// Throws DomainError unless 0 < scale <= min(width, height) * spacing / 8.
WaveletKernel build_log_kernel(const GridSpec& spec, double scale);

/// Kernel of h(p/2): response(w) = 4 * base(2w), scale doubled. The base
/// closed form is evaluated at 2w directly, so no spectral wrap occurs.
WaveletKernel dilate_kernel(const WaveletKernel& kernel);

/// Periodic convolution as a pointwise spectral product.
FieldGrid apply_filter(const FieldGrid& field, const WaveletKernel& kernel);

struct KernelPair {
  WaveletKernel base;
  WaveletKernel dilated;
};

/// Dyadic pairs (s_i, 2 s_i) for strictly increasing scales, n >= 3.
class FilterBank {
 public:
  FilterBank(const GridSpec& spec, std::vector<double> scales,
             KernelFamily family = KernelFamily::LaplacianOfGaussian);

  const GridSpec& spec() const noexcept { return spec_; }
  KernelFamily family() const noexcept { return family_; }
  const std::vector<double>& scales() const noexcept { return scales_; }
  std::size_t size() const noexcept { return pairs_.size(); }
  const KernelPair& pair(std::size_t i) const;

 private:
  GridSpec spec_;
  KernelFamily family_;
  std::vector<double> scales_;
  std::vector<KernelPair> pairs_;
};

struct FilteredPair {
  double scale = 0.0;
  FieldGrid y1;
  FieldGrid y2;
};

FilteredPair filter_pair(const FieldGrid& field, const FilterBank& bank, std::size_t scale_index);

}  // namespace fracsar
