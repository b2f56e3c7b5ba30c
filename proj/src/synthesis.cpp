#include "fracsar/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "fracsar/error.hpp"
#include "fracsar/fft.hpp"

namespace fracsar {

void SpectralPowerLaw::validate() const {
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) {
    throw DomainError("power-law amplitude must be positive");
  }
  if (!(exponent >= 0.0 && exponent < 6.0)) {
    throw DomainError("power-law exponent must lie in [0, 6), got " + std::to_string(exponent));
  }
}

double SpectralPowerLaw::density(double omega) const {
  return amplitude * std::pow(omega, -exponent);
}

namespace {

// Hermitian-symmetric standard complex Gaussian spectrum scaled so that its
// inverse transform is unit-variance white noise, then shaped by sqrt(S)/spacing.
template <class Density>
SynthesisResult shaped_gaussian_field(const GridSpec& spec, std::uint64_t seed,
                                      Density density) {
  spec.validate();
  const int h = spec.height;
  const int w = spec.width;
  const std::size_t n = spec.pixel_count();
  const double root_n = std::sqrt(static_cast<double>(n));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<fft::Complex> spectrum(n);
  for (int r = 0; r < h; ++r) {
    const int pr = (h - r) % h;
    for (int c = 0; c < w; ++c) {
      const int pc = (w - c) % w;
      const std::size_t self = static_cast<std::size_t>(r) * w + c;
      const std::size_t partner = static_cast<std::size_t>(pr) * w + pc;
      if (partner < self) continue;
      if (partner == self) {
        spectrum[self] = {normal(rng) * root_n, 0.0};
      } else {
        const double re = normal(rng) * std::numbers::sqrt2 / 2.0;
        const double im = normal(rng) * std::numbers::sqrt2 / 2.0;
        spectrum[self] = fft::Complex(re, im) * root_n;
        spectrum[partner] = std::conj(spectrum[self]);
      }
    }
  }

  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * w + c;
      if (r == 0 && c == 0) {
        spectrum[i] = 0.0;
        continue;
      }
      spectrum[i] *= std::sqrt(density(radial_frequency(spec, r, c))) / spec.spacing;
    }
  }

  const auto complex_field = fft::inverse(h, w, spectrum);
  SynthesisResult result;
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    values[i] = complex_field[i].real();
    result.max_imag_residue = std::max(result.max_imag_residue, std::abs(complex_field[i].imag()));
    result.max_abs_real = std::max(result.max_abs_real, std::abs(values[i]));
  }
  result.field = FieldGrid(spec, std::move(values));
  return result;
}

}  // namespace

SynthesisResult synthesize_power_law_field_checked(const GridSpec& spec,
                                                   const SpectralPowerLaw& model,
                                                   std::uint64_t seed) {
  model.validate();
  return shaped_gaussian_field(spec, seed, [&](double omega) { return model.density(omega); });
}

FieldGrid synthesize_power_law_field(const GridSpec& spec, const SpectralPowerLaw& model,
                                     std::uint64_t seed) {
  return synthesize_power_law_field_checked(spec, model, seed).field;
}

FieldGrid synthesize_short_range_field(const GridSpec& spec, double corr_length,
                                       std::uint64_t seed) {
  if (!(corr_length > 0.0) || !std::isfinite(corr_length)) {
    throw ConfigError("correlation length must be positive");
  }
  // 2-D Fourier transform of exp(-r/L).
  const double l2 = corr_length * corr_length;
  auto density = [&](double omega) {
    return 2.0 * std::numbers::pi * l2 / std::pow(1.0 + l2 * omega * omega, 1.5);
  };
  return shaped_gaussian_field(spec, seed, density).field;
}

FieldGrid normalize_variance(const FieldGrid& field) {
  const double m = mean(field.values());
  const double var = variance(field.values());
  if (!(var > 0.0)) throw DegenerateError("cannot normalize a constant field");
  const double inv_sd = 1.0 / std::sqrt(var);
  std::vector<double> out(field.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (field.values()[i] - m) * inv_sd;
  return FieldGrid(field.spec(), std::move(out));
}

std::vector<double> blend_weights(const BinaryMask& region, double blend_width) {
  const int h = region.height();
  const int w = region.width();
  std::vector<double> weights(region.size());
  for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = region[i] ? 1.0 : 0.0;
  if (!(blend_width > 0.0)) return weights;

  // Only pixels within blend_width/2 of the boundary are blended; the
  // distance to the nearest opposite-label pixel centre is searched locally.
  const double half = 0.5 * blend_width;
  const int reach = static_cast<int>(std::ceil(half + 0.5));
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const bool inside = region(r, c);
      double best = std::numeric_limits<double>::infinity();
      for (int dr = -reach; dr <= reach; ++dr) {
        const int rr = r + dr;
        if (rr < 0 || rr >= h) continue;
        for (int dc = -reach; dc <= reach; ++dc) {
          const int cc = c + dc;
          if (cc < 0 || cc >= w || region(rr, cc) == inside) continue;
          best = std::min(best, std::hypot(static_cast<double>(dr), static_cast<double>(dc)));
        }
      }
      if (!std::isfinite(best)) continue;
      // Boundary sits half a pixel from the nearest opposite pixel centre.
      const double signed_dist = inside ? best - 0.5 : -(best - 0.5);
      weights[region.index(r, c)] = std::clamp(0.5 + signed_dist / blend_width, 0.0, 1.0);
    }
  }
  return weights;
}

EmbedResult embed_anomaly(const FieldGrid& base, const BinaryMask& region,
                          const SpectralPowerLaw& anomaly, double blend_width,
                          std::uint64_t seed, double brightness_offset) {
  if (region.width() != base.width() || region.height() != base.height()) {
    throw DimensionError("anomaly mask does not match the base grid");
  }
  anomaly.validate();
  if (!(anomaly.exponent > 0.0)) throw DomainError("anomaly exponent must be positive");
  if (blend_width < 0.0) throw ConfigError("blend width must be non-negative");
  if (region.empty_region()) return {base, region, true};

  const FieldGrid outside = normalize_variance(base);
  const FieldGrid inside =
      normalize_variance(synthesize_power_law_field(base.spec(), anomaly, seed));
  const auto weights = blend_weights(region, blend_width);
  std::vector<double> out(base.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double t = weights[i];
    out[i] = (1.0 - t) * outside.values()[i] + t * (inside.values()[i] + brightness_offset);
  }
  return {FieldGrid(base.spec(), std::move(out)), region, false};
}

FieldGrid apply_speckle(const FieldGrid& field, int looks, std::uint64_t seed) {
  if (looks < 1) throw ConfigError("speckle looks must be >= 1");
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> gamma(static_cast<double>(looks), 1.0 / looks);
  std::vector<double> out(field.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(field.values()[i]) * gamma(rng);
  return FieldGrid(field.spec(), std::move(out));
}

CorrelationProfile radial_correlation(const FieldGrid& field, int max_lag) {
  const int h = field.height();
  const int w = field.width();
  if (max_lag < 0 || 2 * max_lag >= std::min(w, h)) {
    throw ConfigError("max_lag must be below half the smaller grid dimension");
  }
  const auto vals = field.values();
  if (std::all_of(vals.begin(), vals.end(), [&](double v) { return v == vals.front(); })) {
    throw DegenerateError("constant field has a degenerate correlation profile");
  }

  // Zero padding by max_lag removes circular wrap for every requested lag.
  const int ph = h + max_lag;
  const int pw = w + max_lag;
  const double m = mean(vals);
  std::vector<double> padded(static_cast<std::size_t>(ph) * pw, 0.0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) padded[static_cast<std::size_t>(r) * pw + c] = field(r, c) - m;
  }
  auto spectrum = fft::forward_real(ph, pw, padded);
  for (auto& v : spectrum) v = std::norm(v);
  const auto lagged_sums = fft::inverse_real(ph, pw, spectrum);

  const auto bins = static_cast<std::size_t>(max_lag) + 1;
  std::vector<double> sums(bins, 0.0);
  std::vector<std::uint64_t> counts(bins, 0);
  for (int dy = -max_lag; dy <= max_lag; ++dy) {
    for (int dx = -max_lag; dx <= max_lag; ++dx) {
      const auto bin = static_cast<std::size_t>(std::lround(std::hypot(dx, dy)));
      if (bin >= bins) continue;
      const int r = (dy + ph) % ph;
      const int c = (dx + pw) % pw;
      const auto pairs = static_cast<std::uint64_t>(h - std::abs(dy)) *
                         static_cast<std::uint64_t>(w - std::abs(dx));
      sums[bin] += lagged_sums[static_cast<std::size_t>(r) * pw + c];
      counts[bin] += pairs;
    }
  }

  CorrelationProfile profile;
  for (std::size_t k = 0; k < bins; ++k) {
    profile.lags.push_back(static_cast<double>(k));
    profile.values.push_back(sums[k] / static_cast<double>(counts[k]));
    profile.count_per_lag.push_back(counts[k]);
  }
  return profile;
}

std::vector<double> lrd_divergence_statistic(const CorrelationProfile& profile,
                                             std::span<const double> radii) {
  if (profile.lags.empty()) throw DataError("empty correlation profile");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (radii[i] < 0.0 || radii[i] > profile.lags.back()) {
      throw ConfigError("radius outside the correlation profile lag range");
    }
    if (i > 0 && !(radii[i] > radii[i - 1])) throw ConfigError("radii must be increasing");
  }
  std::vector<double> out;
  out.reserve(radii.size());
  double acc = 0.0;
  std::size_t k = 0;
  for (double rho : radii) {
    while (k < profile.lags.size() && profile.lags[k] <= rho) {
      const double dr = k == 0 ? 1.0 : profile.lags[k] - profile.lags[k - 1];
      acc += std::abs(profile.values[k]) * 2.0 * std::numbers::pi * profile.lags[k] * dr;
      ++k;
    }
    out.push_back(acc);
  }
  return out;
}

RadialSpectrum radial_periodogram(const FieldGrid& field) {
  const auto& spec = field.spec();
  const int h = spec.height;
  const int w = spec.width;
  const int hw = fft::half_width(w);
  const auto half = fft::forward_real(h, w, field.values());
  const double step = std::min(frequency_step(w, spec.spacing), frequency_step(h, spec.spacing));
  const double norm = spec.spacing * spec.spacing / static_cast<double>(spec.pixel_count());

  RadialSpectrum out;
  // Each half-spectrum column other than 0 and w/2 stands for two bins.
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < hw; ++c) {
      const double omega = radial_frequency(spec, r, c);
      const auto bin = static_cast<std::size_t>(std::lround(omega / step));
      if (bin >= out.power.size()) {
        out.power.resize(bin + 1, 0.0);
        out.frequency.resize(bin + 1, 0.0);
        out.count.resize(bin + 1, 0);
      }
      const std::size_t mult = (c == 0 || (w % 2 == 0 && c == w / 2)) ? 1 : 2;
      const double p = std::norm(half[static_cast<std::size_t>(r) * hw + c]) * norm;
      out.power[bin] += p * static_cast<double>(mult);
      out.frequency[bin] += omega * static_cast<double>(mult);
      out.count[bin] += mult;
    }
  }
  for (std::size_t b = 0; b < out.power.size(); ++b) {
    if (out.count[b] == 0) continue;
    out.power[b] /= static_cast<double>(out.count[b]);
    out.frequency[b] /= static_cast<double>(out.count[b]);
  }
  return out;
}

LineFit fit_loglog_slope(const RadialSpectrum& spectrum, std::size_t first_bin,
                         std::size_t last_bin) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double n = 0;
  for (std::size_t b = first_bin; b <= last_bin && b < spectrum.power.size(); ++b) {
    if (spectrum.count[b] == 0 || !(spectrum.power[b] > 0.0) || !(spectrum.frequency[b] > 0.0)) {
      continue;
    }
    const double x = std::log(spectrum.frequency[b]);
    const double y = std::log(spectrum.power[b]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    n += 1.0;
  }
  if (n < 2.0) throw DataError("too few spectral bins for a slope fit");
  const double denom = n * sxx - sx * sx;
  LineFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

}  // namespace fracsar
