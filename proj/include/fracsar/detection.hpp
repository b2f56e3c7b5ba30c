#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fracsar/estimation.hpp"
#include "fracsar/grid.hpp"

namespace fracsar {

/// Three exponent planes mapped linearly onto 8-bit R, G, B.
struct RgbMap {
  GridSpec spec;
  std::array<std::vector<std::uint8_t>, 3> channels;
  std::array<std::size_t, 3> scale_triple{};
  std::pair<double, double> value_range{0.0, 1.0};
  /// Invalid pixels render (0,0,0); this carries which ones they are.
  BinaryMask valid;
};

/// round(255 * clamp((a - lo) / (hi - lo), 0, 1)).
std::uint8_t exponent_to_byte(double a, double lo, double hi);

RgbMap rgb_from_exponents(const ExponentMap& map, std::array<std::size_t, 3> scale_triple,
                          std::pair<double, double> value_range);

/// Row-major collection of per-pixel feature vectors.
struct FeatureSet {
  std::size_t dim = 0;
  std::vector<double> values;
  /// Pixel index of each sample in the source grid (empty for synthetic sets).
  std::vector<std::size_t> pixels;

  std::size_t size() const noexcept { return dim == 0 ? 0 : values.size() / dim; }
  bool empty() const noexcept { return size() == 0; }
  std::span<const double> row(std::size_t i) const { return {values.data() + i * dim, dim}; }
  void push(std::span<const double> x, std::size_t pixel = 0);
};

/// Exponents a(s_1..s_n, p) for every valid pixel, optionally followed by the
/// cross-scale dispersion. Row-major pixel order.
FeatureSet extract_features(const ExponentMap& map, const AdequacyMap& adequacy,
                            bool include_adequacy);

enum class Combiner { And, Or, NnOnly, LrtOnly };
std::string to_string(Combiner c);
/// Accepts AND, OR, NN_ONLY, LRT_ONLY (case-insensitive); ConfigError otherwise.
Combiner parse_combiner(std::string_view name);

struct DetectionMask {
  GridSpec spec;
  BinaryMask mask;
  std::vector<double> scores_nn;
  std::vector<double> scores_lrt;
  Combiner combiner = Combiner::And;
  int min_region_area = 0;
};

/// Drops 8-connected components with fewer than min_area pixels.
BinaryMask remove_small_components(const BinaryMask& mask, int min_area);

/// Places per-sample scores back on the grid; pixels without a sample get NaN,
/// which never passes a threshold.
std::vector<double> scatter_scores(const GridSpec& spec, const FeatureSet& features,
                                   std::span<const double> scores);

/// Thresholds both score maps (nn > nn_threshold, lrt > lrt_threshold),
/// combines them and removes small components.
DetectionMask classify(const GridSpec& spec, std::vector<double> scores_nn,
                       std::vector<double> scores_lrt, double nn_threshold, double lrt_threshold,
                       Combiner combiner, int min_region_area);

struct MaskMetrics {
  double iou = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  /// Positive predictions among truth-negative pixels.
  double false_alarm_rate = 0.0;
  std::size_t true_positive = 0;
  std::size_t false_positive = 0;
  std::size_t false_negative = 0;
  std::size_t true_negative = 0;
};

/// Empty prediction against empty truth scores (1, 1, 1). Otherwise a 0/0
/// precision or recall is reported as 0.
MaskMetrics evaluate_mask(const BinaryMask& pred, const BinaryMask& truth);
MaskMetrics evaluate_mask(const DetectionMask& pred, const BinaryMask& truth);

}  // namespace fracsar
