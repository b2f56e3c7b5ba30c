#include "fracsar/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fracsar/error.hpp"

namespace fracsar {

namespace {

double mean_square_about_mean(std::span<const double> v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

}  // namespace

VariancePair global_variance_pair(const FilteredPair& pair) {
  VariancePair vp;
  vp.v1 = mean_square_about_mean(pair.y1.values());
  vp.v2 = mean_square_about_mean(pair.y2.values());
  vp.sample_count = pair.y1.size();
  if (vp.v1 == 0.0 && vp.v2 == 0.0) {
    throw DegenerateError("filtered outputs carry no energy");
  }
  return vp;
}

double exponent_from_variances(const VariancePair& vp, double relative_floor) {
  if (!(vp.v1 > relative_floor * vp.v2)) {
    throw DegenerateError("first-scale variance below floor; exponent undefined");
  }
  return std::log2(vp.v2 / vp.v1) - 2.0;
}

std::vector<double> global_exponents(const FieldGrid& field, const FilterBank& bank) {
  std::vector<double> out;
  out.reserve(bank.size());
  for (std::size_t i = 0; i < bank.size(); ++i) {
    out.push_back(exponent_from_variances(global_variance_pair(filter_pair(field, bank, i))));
  }
  return out;
}

double ExponentMap::valid_mean(std::size_t plane) const {
  const auto& p = planes.at(plane);
  double s = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!valid[i]) continue;
    s += p[i];
    ++n;
  }
  return n == 0 ? std::numeric_limits<double>::quiet_NaN() : s / static_cast<double>(n);
}

std::vector<double> gaussian_smooth_periodic(const std::vector<double>& values, int height,
                                             int width, double sigma) {
  const int half = static_cast<int>(std::floor(3.0 * sigma));
  std::vector<double> taps(static_cast<std::size_t>(2 * half + 1));
  double total = 0.0;
  for (int k = -half; k <= half; ++k) {
    taps[static_cast<std::size_t>(k + half)] = std::exp(-0.5 * k * k / (sigma * sigma));
    total += taps[static_cast<std::size_t>(k + half)];
  }
  for (auto& t : taps) t /= total;

  auto wrap = [](int i, int n) { return ((i % n) + n) % n; };
  std::vector<double> rows(values.size());
  for (int r = 0; r < height; ++r) {
    const double* src = values.data() + static_cast<std::size_t>(r) * width;
    double* dst = rows.data() + static_cast<std::size_t>(r) * width;
    for (int c = 0; c < width; ++c) {
      double acc = 0.0;
      for (int k = -half; k <= half; ++k) acc += taps[static_cast<std::size_t>(k + half)] * src[wrap(c + k, width)];
      dst[c] = acc;
    }
  }
  std::vector<double> out(values.size());
  std::vector<int> src_rows(taps.size());
  for (int r = 0; r < height; ++r) {
    for (int k = -half; k <= half; ++k) src_rows[static_cast<std::size_t>(k + half)] = wrap(r + k, height);
    double* dst = out.data() + static_cast<std::size_t>(r) * width;
    for (std::size_t t = 0; t < taps.size(); ++t) {
      const double* src = rows.data() + static_cast<std::size_t>(src_rows[t]) * width;
      const double wt = taps[t];
      for (int c = 0; c < width; ++c) dst[c] += wt * src[c];
    }
  }
  return out;
}

int local_margin(const FilterBank& bank, double window_radius) {
  const double largest_dilated_px = 2.0 * bank.scales().back() / bank.spec().spacing;
  return static_cast<int>(std::ceil(window_radius + 4.0 * largest_dilated_px));
}

ExponentMap local_exponent_map(const FieldGrid& field, const FilterBank& bank,
                               const LocalEstimateOptions& options) {
  const double largest_px = bank.scales().back() / bank.spec().spacing;
  if (!(options.window_radius >= 2.0 * largest_px)) {
    throw ConfigError("window radius " + std::to_string(options.window_radius) +
                      " is below twice the largest scale (" + std::to_string(2.0 * largest_px) +
                      " px)");
  }
  if (!(options.report_min < options.report_max)) throw ConfigError("empty report range");

  const auto& spec = field.spec();
  const int h = spec.height;
  const int w = spec.width;
  const std::size_t n = spec.pixel_count();
  const double sigma = options.window_radius / 2.0;

  ExponentMap map;
  map.spec = spec;
  map.scales = bank.scales();
  map.window_radius = options.window_radius;
  map.margin = local_margin(bank, options.window_radius);
  map.valid = BinaryMask(w, h);
  for (int r = map.margin; r < h - map.margin; ++r) {
    for (int c = map.margin; c < w - map.margin; ++c) map.valid.set(r, c, true);
  }

  std::vector<std::vector<double>> raw;
  raw.reserve(bank.size());
  for (std::size_t s = 0; s < bank.size(); ++s) {
    const auto pair = filter_pair(field, bank, s);
    std::vector<double> sq1(n), sq2(n);
    for (std::size_t i = 0; i < n; ++i) {
      sq1[i] = pair.y1.values()[i] * pair.y1.values()[i];
      sq2[i] = pair.y2.values()[i] * pair.y2.values()[i];
    }
    const auto m1 = gaussian_smooth_periodic(sq1, h, w, sigma);
    const auto m2 = gaussian_smooth_periodic(sq2, h, w, sigma);
    std::vector<double> plane(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!(m1[i] > options.relative_floor * m2[i])) {
        map.valid.set(i, false);
        continue;
      }
      plane[i] = std::log2(m2[i] / m1[i]) - 2.0;
    }
    raw.push_back(std::move(plane));
  }

  for (auto& plane : raw) {
    BinaryMask low(w, h);
    for (std::size_t i = 0; i < n; ++i) {
      if (!map.valid[i]) {
        plane[i] = kInvalidExponent;
        continue;
      }
      if (plane[i] < options.report_min || plane[i] > options.report_max) {
        // log2(0) from an empty second moment lands here as -inf.
        low.set(i, true);
        plane[i] = std::clamp(plane[i], options.report_min, options.report_max);
      }
    }
    map.planes.push_back(std::move(plane));
    map.low_confidence.push_back(std::move(low));
  }
  return map;
}

double AdequacyMap::mean_dispersion() const {
  double s = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < dispersion.size(); ++i) {
    if (!valid[i]) continue;
    s += dispersion[i];
    ++n;
  }
  return n == 0 ? std::numeric_limits<double>::quiet_NaN() : s / static_cast<double>(n);
}

AdequacyMap adequacy_statistic(const ExponentMap& map) {
  if (map.plane_count() < 2) throw ConfigError("adequacy needs at least two exponent planes");
  const std::size_t n = map.spec.pixel_count();
  const double k = static_cast<double>(map.plane_count());
  AdequacyMap out;
  out.spec = map.spec;
  out.valid = map.valid;
  out.dispersion.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!map.valid[i]) continue;
    // Offsets from the first plane keep identical planes at exactly zero.
    const double ref = map.planes.front()[i];
    double m = 0.0;
    for (const auto& p : map.planes) m += p[i] - ref;
    m /= k;
    double ss = 0.0;
    for (const auto& p : map.planes) ss += (p[i] - ref - m) * (p[i] - ref - m);
    out.dispersion[i] = std::sqrt(ss / k);
  }
  return out;
}

HurstValue exponent_to_hurst(double exponent) {
  HurstValue hv;
  hv.hurst = (exponent - 2.0) / 2.0;
  hv.in_range = hv.hurst > 0.0 && hv.hurst < 1.0;
  return hv;
}

}  // namespace fracsar
