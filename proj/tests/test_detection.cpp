#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fracsar/detection.hpp"
#include "fracsar/error.hpp"

using namespace fracsar;

namespace {

ExponentMap random_map(int w, int h, std::size_t planes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 3.5);
  std::bernoulli_distribution keep(0.9);
  ExponentMap m;
  m.spec = {w, h, 1.0};
  m.valid = BinaryMask(w, h);
  for (std::size_t i = 0; i < m.spec.pixel_count(); ++i) m.valid.set(i, keep(rng));
  for (std::size_t p = 0; p < planes; ++p) {
    std::vector<double> v(m.spec.pixel_count());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = m.valid[i] ? u(rng) : std::nan("");
    m.planes.push_back(std::move(v));
    m.scales.push_back(std::pow(2.0, static_cast<double>(p + 1)));
    m.low_confidence.emplace_back(w, h);
  }
  return m;
}

BinaryMask disc(int w, int h, double cx, double cy, double radius) {
  BinaryMask m(w, h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) m.set(r, c, std::hypot(c - cx, r - cy) <= radius);
  }
  return m;
}

}  // namespace

TEST(RgbMap, BytesFollowTheLinearMap) {
  EXPECT_EQ(exponent_to_byte(1.5, 0.0, 3.0), 128);
  EXPECT_EQ(exponent_to_byte(0.0, 0.0, 3.0), 0);
  EXPECT_EQ(exponent_to_byte(3.0, 0.0, 3.0), 255);
  EXPECT_EQ(exponent_to_byte(-2.0, 0.0, 3.0), 0);
  EXPECT_EQ(exponent_to_byte(9.0, 0.0, 3.0), 255);

  const auto map = random_map(40, 30, 4, 3);
  const auto rgb = rgb_from_exponents(map, {3, 0, 2}, {-0.25, 3.1});
  const std::array<std::size_t, 3> planes{3, 0, 2};
  for (std::size_t i = 0; i < map.spec.pixel_count(); ++i) {
    for (std::size_t ch = 0; ch < 3; ++ch) {
      if (!map.valid[i]) {
        EXPECT_EQ(rgb.channels[ch][i], 0);
        continue;
      }
      const double t = std::clamp((map.planes[planes[ch]][i] + 0.25) / 3.35, 0.0, 1.0);
      EXPECT_EQ(rgb.channels[ch][i], static_cast<std::uint8_t>(std::lround(255.0 * t)));
    }
  }
}

TEST(RgbMap, EqualPlanesAreGrey) {
  auto map = random_map(32, 32, 3, 5);
  map.planes[1] = map.planes[0];
  map.planes[2] = map.planes[0];
  const auto rgb = rgb_from_exponents(map, {0, 1, 2}, {0.0, 3.0});
  for (std::size_t i = 0; i < map.spec.pixel_count(); ++i) {
    EXPECT_EQ(rgb.channels[0][i], rgb.channels[1][i]);
    EXPECT_EQ(rgb.channels[1][i], rgb.channels[2][i]);
  }
}

TEST(RgbMap, RejectsBadConfiguration) {
  const auto map = random_map(16, 16, 3, 1);
  EXPECT_THROW(rgb_from_exponents(map, {0, 1, 2}, {3.0, 0.0}), ConfigError);
  EXPECT_THROW(rgb_from_exponents(map, {0, 1, 1}, {0.0, 3.0}), ConfigError);
  EXPECT_THROW(rgb_from_exponents(map, {0, 1, 3}, {0.0, 3.0}), ConfigError);
}

TEST(Features, OneRowPerValidPixel) {
  const auto map = random_map(20, 20, 3, 7);
  AdequacyMap adequacy{map.spec, std::vector<double>(400, 0.25), map.valid};
  const auto f = extract_features(map, adequacy, true);
  EXPECT_EQ(f.dim, 4u);
  EXPECT_EQ(f.size(), map.valid.count());
  for (std::size_t k = 0; k < f.size(); ++k) {
    const auto px = f.pixels[k];
    EXPECT_TRUE(map.valid[px]);
    EXPECT_EQ(f.row(k)[1], map.planes[1][px]);
    EXPECT_EQ(f.row(k)[3], 0.25);
  }
  std::vector<double> scores(f.size(), 1.0);
  const auto grid = scatter_scores(map.spec, f, scores);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_EQ(std::isnan(grid[i]), !map.valid[i]);
}

TEST(Components, EightConnectivityAndMinimumArea) {
  BinaryMask m(10, 10);
  m.set(1, 1, true);
  m.set(2, 2, true);  // diagonal neighbour, same component
  m.set(3, 3, true);
  m.set(7, 7, true);
  m.set(7, 8, true);
  const auto kept = remove_small_components(m, 3);
  EXPECT_EQ(kept.count(), 3u);
  EXPECT_TRUE(kept(2, 2));
  EXPECT_FALSE(kept(7, 7));
  EXPECT_EQ(remove_small_components(m, 0), m);
}

TEST(Components, DiscSurvivesSpecklesRemoved) {
  auto m = disc(128, 128, 64, 64, 20);
  const auto disc_area = m.count();
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> pos(0, 127);
  for (int k = 0; k < 200; ++k) {
    const int r = pos(rng);
    const int c = pos(rng);
    if (std::hypot(c - 64, r - 64) > 24) m.set(r, c, true);
  }
  const auto kept = remove_small_components(m, 32);
  EXPECT_EQ(kept, disc(128, 128, 64, 64, 20));
  EXPECT_EQ(kept.count(), disc_area);
}

TEST(Metrics, MatchBruteForceCounts) {
  const auto truth = disc(100, 100, 50, 50, 20);
  const auto pred = disc(100, 100, 53, 50, 22);
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    tp += pred[i] && truth[i];
    fp += pred[i] && !truth[i];
    fn += !pred[i] && truth[i];
    tn += !pred[i] && !truth[i];
  }
  const auto m = evaluate_mask(pred, truth);
  EXPECT_EQ(m.true_positive, tp);
  EXPECT_EQ(m.false_positive, fp);
  EXPECT_EQ(m.false_negative, fn);
  EXPECT_EQ(m.true_negative, tn);
  EXPECT_DOUBLE_EQ(m.iou, static_cast<double>(tp) / static_cast<double>(tp + fp + fn));
  EXPECT_DOUBLE_EQ(m.precision, static_cast<double>(tp) / static_cast<double>(tp + fp));
  EXPECT_DOUBLE_EQ(m.recall, static_cast<double>(tp) / static_cast<double>(tp + fn));
  EXPECT_DOUBLE_EQ(m.false_alarm_rate, static_cast<double>(fp) / static_cast<double>(fp + tn));
}

TEST(Metrics, EmptyMasks) {
  const BinaryMask empty(16, 16);
  const auto both = evaluate_mask(empty, empty);
  EXPECT_EQ(both.iou, 1.0);
  EXPECT_EQ(both.precision, 1.0);
  EXPECT_EQ(both.recall, 1.0);
  EXPECT_EQ(both.false_alarm_rate, 0.0);
  const auto missed = evaluate_mask(empty, disc(16, 16, 8, 8, 3));
  EXPECT_EQ(missed.iou, 0.0);
  EXPECT_EQ(missed.precision, 0.0);
  EXPECT_EQ(missed.recall, 0.0);
  EXPECT_THROW(evaluate_mask(empty, BinaryMask(8, 8)), DimensionError);
}

TEST(Classify, Combiners) {
  const GridSpec spec{8, 8, 1.0};
  std::vector<double> nn(64, 0.0), lrt(64, 0.0);
  for (std::size_t i = 0; i < 32; ++i) nn[i] = 1.0;
  for (std::size_t i = 16; i < 48; ++i) lrt[i] = 1.0;
  EXPECT_EQ(classify(spec, nn, lrt, 0.5, 0.5, Combiner::And, 0).mask.count(), 16u);
  EXPECT_EQ(classify(spec, nn, lrt, 0.5, 0.5, Combiner::Or, 0).mask.count(), 48u);
  EXPECT_EQ(classify(spec, nn, lrt, 0.5, 0.5, Combiner::NnOnly, 0).mask.count(), 32u);
  EXPECT_EQ(classify(spec, nn, lrt, 0.5, 0.5, Combiner::LrtOnly, 0).mask.count(), 32u);
  EXPECT_EQ(classify(spec, nn, lrt, 0.5, 0.5, Combiner::And, 17).mask.count(), 0u);
  nn[60] = std::nan("");
  EXPECT_FALSE(classify(spec, nn, lrt, 0.5, 0.5, Combiner::Or, 0).mask[60]);
  EXPECT_EQ(parse_combiner("and"), Combiner::And);
  EXPECT_EQ(parse_combiner("LRT_ONLY"), Combiner::LrtOnly);
  EXPECT_THROW(parse_combiner("xor"), ConfigError);
}
