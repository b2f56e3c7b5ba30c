#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fracsar/grid.hpp"

namespace fracsar {

/// Isotropic power-law spectral density S(w) = amplitude * |w|^(-exponent).
struct SpectralPowerLaw {
  double amplitude = 1.0;
  double exponent = 0.0;

  /// Throws DomainError unless amplitude > 0 and 0 <= exponent < 6.
  void validate() const;
  double density(double omega) const;
};

/// Field plus the imaginary residue left by the complex inverse transform.
struct SynthesisResult {
  FieldGrid field;
  double max_imag_residue = 0.0;
  double max_abs_real = 0.0;
};

/// Zero-mean Gaussian field with spectral density amplitude*|w|^-a at every
/// non-DC grid frequency. Deterministic in seed.
SynthesisResult synthesize_power_law_field_checked(const GridSpec& spec,
                                                   const SpectralPowerLaw& model,
                                                   std::uint64_t seed);
FieldGrid synthesize_power_law_field(const GridSpec& spec, const SpectralPowerLaw& model,
                                     std::uint64_t seed);

/// Zero-mean Gaussian field with covariance exp(-r/corr_length), r in physical units.
FieldGrid synthesize_short_range_field(const GridSpec& spec, double corr_length,
                                       std::uint64_t seed);

/// Rescales to zero mean and unit sample variance. Throws DegenerateError
/// for a constant field.
FieldGrid normalize_variance(const FieldGrid& field);

/// Per-pixel anomaly weight in [0,1]: 1 deep inside the region, 0 far
/// outside, linear over blend_width pixels centred on the region boundary.
std::vector<double> blend_weights(const BinaryMask& region, double blend_width);

struct EmbedResult {
  FieldGrid field;
  BinaryMask truth;
  /// Set when the region was empty and the base was returned unchanged.
  bool empty_region = false;
};

/// Composites a second power-law texture into `region`. Both textures are
/// variance-normalized, then cross-faded with blend_weights. brightness_offset
/// is added inside the region (scaled by the weight); 0 keeps a pure texture cue.
EmbedResult embed_anomaly(const FieldGrid& base, const BinaryMask& region,
                          const SpectralPowerLaw& anomaly, double blend_width,
                          std::uint64_t seed, double brightness_offset = 0.0);

/// Multi-look intensity speckle: exp(field) * Gamma(looks, 1/looks).
FieldGrid apply_speckle(const FieldGrid& field, int looks, std::uint64_t seed);

/// Isotropic empirical covariance, unit-width lag bins starting at 0.
struct CorrelationProfile {
  std::vector<double> lags;
  std::vector<double> values;
  std::vector<std::uint64_t> count_per_lag;
};

/// values[k] averages (x(p)-m)(x(q)-m) over all ordered pixel pairs with
/// round(|p-q|) == k. Requires max_lag < min(width, height)/2.
CorrelationProfile radial_correlation(const FieldGrid& field, int max_lag);

/// Partial integrals S(rho) = sum_{r<=rho} |R(r)| * 2*pi*r * dr.
std::vector<double> lrd_divergence_statistic(const CorrelationProfile& profile,
                                             std::span<const double> radii);

/// Periodogram |X_k|^2 * spacing^2 / N averaged over annuli of unit width in
/// frequency-index units. Bin 0 (DC) is included but holds zero power for
/// synthesized fields.
struct RadialSpectrum {
  std::vector<double> frequency;  // mean |w| over the bin, rad per unit
  std::vector<double> power;
  std::vector<std::size_t> count;
};
RadialSpectrum radial_periodogram(const FieldGrid& field);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least-squares line through (log w, log P) over bins first_bin..last_bin.
LineFit fit_loglog_slope(const RadialSpectrum& spectrum, std::size_t first_bin,
                         std::size_t last_bin);

}  // namespace fracsar
