#include "fracsar/detection.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "fracsar/error.hpp"

namespace fracsar {

std::uint8_t exponent_to_byte(double a, double lo, double hi) {
  const double t = std::clamp((a - lo) / (hi - lo), 0.0, 1.0);
  return static_cast<std::uint8_t>(std::lround(255.0 * t));
}

RgbMap rgb_from_exponents(const ExponentMap& map, std::array<std::size_t, 3> scale_triple,
                          std::pair<double, double> value_range) {
  if (!(value_range.first < value_range.second) || !std::isfinite(value_range.first) ||
      !std::isfinite(value_range.second)) {
    throw ConfigError("RGB value range must satisfy a_min < a_max");
  }
  for (std::size_t i = 0; i < 3; ++i) {
    if (scale_triple[i] >= map.plane_count()) throw ConfigError("RGB plane index out of range");
    for (std::size_t j = 0; j < i; ++j) {
      if (scale_triple[i] == scale_triple[j]) throw ConfigError("RGB plane indices must be distinct");
    }
  }
  RgbMap rgb;
  rgb.spec = map.spec;
  rgb.scale_triple = scale_triple;
  rgb.value_range = value_range;
  rgb.valid = map.valid;
  const std::size_t n = map.spec.pixel_count();
  for (std::size_t ch = 0; ch < 3; ++ch) {
    const auto& plane = map.planes[scale_triple[ch]];
    auto& out = rgb.channels[ch];
    out.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (map.valid[i]) out[i] = exponent_to_byte(plane[i], value_range.first, value_range.second);
    }
  }
  return rgb;
}

void FeatureSet::push(std::span<const double> x, std::size_t pixel) {
  if (x.size() != dim) throw DimensionError("feature length does not match the set dimension");
  values.insert(values.end(), x.begin(), x.end());
  pixels.push_back(pixel);
}

FeatureSet extract_features(const ExponentMap& map, const AdequacyMap& adequacy,
                            bool include_adequacy) {
  if (!(map.spec == adequacy.spec) || !(map.valid == adequacy.valid)) {
    throw DimensionError("exponent and adequacy maps do not share grid and validity");
  }
  FeatureSet set;
  set.dim = map.plane_count() + (include_adequacy ? 1 : 0);
  std::vector<double> x(set.dim);
  for (std::size_t i = 0; i < map.spec.pixel_count(); ++i) {
    if (!map.valid[i]) continue;
    for (std::size_t p = 0; p < map.plane_count(); ++p) x[p] = map.planes[p][i];
    if (include_adequacy) x.back() = adequacy.dispersion[i];
    set.push(x, i);
  }
  return set;
}

std::string to_string(Combiner c) {
  switch (c) {
    case Combiner::And: return "AND";
    case Combiner::Or: return "OR";
    case Combiner::NnOnly: return "NN_ONLY";
    case Combiner::LrtOnly: return "LRT_ONLY";
  }
  return "UNKNOWN";
}

Combiner parse_combiner(std::string_view name) {
  std::string up(name);
  for (auto& ch : up) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  if (up == "AND") return Combiner::And;
  if (up == "OR") return Combiner::Or;
  if (up == "NN_ONLY") return Combiner::NnOnly;
  if (up == "LRT_ONLY") return Combiner::LrtOnly;
  throw ConfigError("unknown combiner '" + std::string(name) + "'");
}

BinaryMask remove_small_components(const BinaryMask& mask, int min_area) {
  const int h = mask.height();
  const int w = mask.width();
  BinaryMask out(w, h);
  std::vector<std::uint8_t> seen(mask.size(), 0);
  std::vector<std::size_t> stack;
  std::vector<std::size_t> component;
  for (std::size_t start = 0; start < mask.size(); ++start) {
    if (!mask[start] || seen[start]) continue;
    component.clear();
    stack.assign(1, start);
    seen[start] = 1;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      component.push_back(i);
      const int r = static_cast<int>(i / static_cast<std::size_t>(w));
      const int c = static_cast<int>(i % static_cast<std::size_t>(w));
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const int rr = r + dr;
          const int cc = c + dc;
          if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
          const std::size_t j = mask.index(rr, cc);
          if (mask[j] && !seen[j]) {
            seen[j] = 1;
            stack.push_back(j);
          }
        }
      }
    }
    if (component.size() >= static_cast<std::size_t>(std::max(min_area, 0))) {
      for (std::size_t i : component) out.set(i, true);
    }
  }
  return out;
}

std::vector<double> scatter_scores(const GridSpec& spec, const FeatureSet& features,
                                   std::span<const double> scores) {
  if (scores.size() != features.size() || features.pixels.size() != features.size()) {
    throw DimensionError("score count does not match the feature set");
  }
  std::vector<double> grid(spec.pixel_count(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 0; k < scores.size(); ++k) {
    if (features.pixels[k] >= grid.size()) throw DimensionError("feature pixel outside the grid");
    grid[features.pixels[k]] = scores[k];
  }
  return grid;
}

DetectionMask classify(const GridSpec& spec, std::vector<double> scores_nn,
                       std::vector<double> scores_lrt, double nn_threshold, double lrt_threshold,
                       Combiner combiner, int min_region_area) {
  const std::size_t n = spec.pixel_count();
  if (scores_nn.size() != n || scores_lrt.size() != n) {
    throw DimensionError("score maps do not match the grid");
  }
  if (!std::isfinite(nn_threshold) || !std::isfinite(lrt_threshold)) {
    throw ConfigError("classifier thresholds must be finite");
  }
  BinaryMask raw(spec.width, spec.height);
  for (std::size_t i = 0; i < n; ++i) {
    const bool nn = scores_nn[i] > nn_threshold;
    const bool lrt = scores_lrt[i] > lrt_threshold;
    bool hit = false;
    switch (combiner) {
      case Combiner::And: hit = nn && lrt; break;
      case Combiner::Or: hit = nn || lrt; break;
      case Combiner::NnOnly: hit = nn; break;
      case Combiner::LrtOnly: hit = lrt; break;
    }
    raw.set(i, hit);
  }
  DetectionMask out;
  out.spec = spec;
  out.mask = remove_small_components(raw, min_region_area);
  out.scores_nn = std::move(scores_nn);
  out.scores_lrt = std::move(scores_lrt);
  out.combiner = combiner;
  out.min_region_area = min_region_area;
  return out;
}

MaskMetrics evaluate_mask(const BinaryMask& pred, const BinaryMask& truth) {
  if (pred.width() != truth.width() || pred.height() != truth.height()) {
    throw DimensionError("prediction and truth masks differ in size");
  }
  MaskMetrics m;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred[i];
    const bool t = truth[i];
    if (p && t) ++m.true_positive;
    else if (p) ++m.false_positive;
    else if (t) ++m.false_negative;
    else ++m.true_negative;
  }
  const auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  const std::size_t pred_pos = m.true_positive + m.false_positive;
  const std::size_t truth_pos = m.true_positive + m.false_negative;
  if (pred_pos == 0 && truth_pos == 0) {
    m.iou = m.precision = m.recall = 1.0;
  } else {
    m.iou = ratio(m.true_positive, m.true_positive + m.false_positive + m.false_negative);
    m.precision = ratio(m.true_positive, pred_pos);
    m.recall = ratio(m.true_positive, truth_pos);
  }
  m.false_alarm_rate = ratio(m.false_positive, m.false_positive + m.true_negative);
  return m;
}

MaskMetrics evaluate_mask(const DetectionMask& pred, const BinaryMask& truth) {
  return evaluate_mask(pred.mask, truth);
}

}  // namespace fracsar
