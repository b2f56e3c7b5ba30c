#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "fracsar/filterbank.hpp"
#include "fracsar/grid.hpp"

namespace fracsar {

/// Second moments of the two filtered outputs of one dyadic pair.
struct VariancePair {
  double v1 = 0.0;
  double v2 = 0.0;
  std::size_t sample_count = 0;
};

/// Mean-removed mean squares over every pixel. Throws DegenerateError when
/// both outputs are identically zero.
VariancePair global_variance_pair(const FilteredPair& pair);

/// Variance-ratio inversion a = log2(v2/v1) - 2. Throws DegenerateError when
/// v1 <= relative_floor * v2 (including v1 == v2 == 0).
double exponent_from_variances(const VariancePair& vp, double relative_floor = 1e-12);

/// Global estimate for every scale of the bank.
std::vector<double> global_exponents(const FieldGrid& field, const FilterBank& bank);

/// Value stored at invalid pixels of an ExponentMap.
inline constexpr double kInvalidExponent = std::numeric_limits<double>::quiet_NaN();

struct LocalEstimateOptions {
  /// Local moments use a Gaussian window with std window_radius/2, truncated at 3 std.
  double window_radius = 32.0;
  double relative_floor = 1e-12;
  double report_min = -1.0;
  double report_max = 7.0;
};

/// Per-pixel, per-scale exponent estimates.
struct ExponentMap {
  GridSpec spec;
  std::vector<double> scales;
  /// planes[i][pixel]; kInvalidExponent where !valid.
  std::vector<std::vector<double>> planes;
  BinaryMask valid;
  /// Set where the raw estimate fell outside the report range and was clamped.
  std::vector<BinaryMask> low_confidence;
  double window_radius = 0.0;
  int margin = 0;

  std::size_t plane_count() const noexcept { return planes.size(); }
  /// Mean of a plane over valid pixels; NaN if none are valid.
  double valid_mean(std::size_t plane) const;
  std::size_t valid_count() const noexcept { return valid.count(); }
};

/// Border width excluded from a local map: window radius plus four times the
/// largest dilated scale, in pixels.
int local_margin(const FilterBank& bank, double window_radius);

/// Throws ConfigError unless window_radius >= 2 * (largest scale in pixels).
ExponentMap local_exponent_map(const FieldGrid& field, const FilterBank& bank,
                               const LocalEstimateOptions& options = {});

/// Periodic separable Gaussian blur with taps truncated at 3 sigma.
std::vector<double> gaussian_smooth_periodic(const std::vector<double>& values, int height,
                                             int width, double sigma);

/// Per-pixel cross-scale standard deviation (divisor n) of the exponent planes.
struct AdequacyMap {
  GridSpec spec;
  std::vector<double> dispersion;
  BinaryMask valid;

  double mean_dispersion() const;
};

AdequacyMap adequacy_statistic(const ExponentMap& map);

struct HurstValue {
  double hurst = 0.0;
  /// True only when hurst lies strictly inside (0, 1).
  bool in_range = false;
};

/// Convention H = (a - 2) / 2 for planar fields.
HurstValue exponent_to_hurst(double exponent);

}  // namespace fracsar
