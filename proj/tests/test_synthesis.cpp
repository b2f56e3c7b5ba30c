#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "fracsar/error.hpp"
#include "fracsar/synthesis.hpp"
#include "support.hpp"

using namespace fracsar;

TEST(PowerLawSynthesis, HermitianResidueIsNegligible) {
  const auto r = synthesize_power_law_field_checked({256, 128, 1.0}, {1.0, 1.5}, 7);
  EXPECT_GT(r.max_abs_real, 0.0);
  EXPECT_LT(r.max_imag_residue, 1e-9 * r.max_abs_real);
}

TEST(PowerLawSynthesis, ZeroMeanBecauseDcIsRemoved) {
  const auto f = synthesize_power_law_field({128, 128, 1.0}, {1.0, 2.0}, 3);
  EXPECT_NEAR(mean(f.values()), 0.0, 1e-12);
}

TEST(PowerLawSynthesis, SameSeedSameField) {
  const GridSpec spec{64, 96, 0.5};
  const auto a = synthesize_power_law_field(spec, {2.0, 1.0}, 11);
  const auto b = synthesize_power_law_field(spec, {2.0, 1.0}, 11);
  const auto c = synthesize_power_law_field(spec, {2.0, 1.0}, 12);
  EXPECT_TRUE(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  EXPECT_FALSE(std::equal(a.values().begin(), a.values().end(), c.values().begin()));
}

TEST(PowerLawSynthesis, PeriodogramSlopeMatchesExponent) {
  for (double a : {0.5, 1.5, 2.5}) {
    const auto f = synthesize_power_law_field({512, 512, 1.0}, {1.0, a}, 21);
    const auto fit = fit_loglog_slope(radial_periodogram(f), 4, 128);
    EXPECT_NEAR(fit.slope, -a, 0.1) << "a=" << a;
  }
}

TEST(PowerLawSynthesis, AmplitudeScalesStandardDeviation) {
  const GridSpec spec{64, 64, 1.0};
  const auto a = synthesize_power_law_field(spec, {1.0, 1.0}, 5);
  const auto b = synthesize_power_law_field(spec, {4.0, 1.0}, 5);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(b.values()[i], 2.0 * a.values()[i], 1e-12);
}

TEST(PowerLawSynthesis, RejectsInvalidModels) {
  EXPECT_THROW(synthesize_power_law_field({64, 64, 1.0}, {1.0, 6.0}, 1), DomainError);
  EXPECT_THROW(synthesize_power_law_field({64, 64, 1.0}, {1.0, -0.1}, 1), DomainError);
  EXPECT_THROW(synthesize_power_law_field({64, 64, 1.0}, {0.0, 1.0}, 1), DomainError);
  EXPECT_THROW(synthesize_power_law_field({4, 64, 1.0}, {1.0, 1.0}, 1), ConfigError);
}

TEST(ShortRangeSynthesis, SpectrumIsFlatAtLowFrequency) {
  const auto f = synthesize_short_range_field({512, 512, 1.0}, 4.0, 2);
  const auto fit = fit_loglog_slope(radial_periodogram(f), 2, 10);
  EXPECT_NEAR(fit.slope, 0.0, 0.25);
}

TEST(NormalizeVariance, UnitVariance) {
  const auto f = normalize_variance(synthesize_power_law_field({128, 128, 1.0}, {3.0, 1.2}, 9));
  EXPECT_NEAR(variance(f.values()), 1.0, 1e-6);
  EXPECT_THROW(normalize_variance(FieldGrid::constant({16, 16, 1.0}, 2.0)), DegenerateError);
}

TEST(BlendWeights, RangeAndLimits) {
  const auto region = ellipse_mask(128, 128, 64, 64, 30, 20);
  const auto w = blend_weights(region, 4.0);
  for (double x : w) {
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, 1.0);
  }
  EXPECT_DOUBLE_EQ(w[64 * 128 + 64], 1.0);
  EXPECT_DOUBLE_EQ(w[5 * 128 + 5], 0.0);
  const auto hard = blend_weights(region, 0.0);
  for (std::size_t i = 0; i < hard.size(); ++i) EXPECT_EQ(hard[i], region[i] ? 1.0 : 0.0);
}

TEST(EmbedAnomaly, UnitVarianceComponentsAndTruth) {
  const GridSpec spec{128, 128, 1.0};
  const auto base = synthesize_power_law_field(spec, {5.0, 0.8}, 1);
  const auto region = ellipse_mask(128, 128, 64, 64, 40, 25);
  const auto r = embed_anomaly(base, region, {1.0, 1.8}, 0.0, 2);
  EXPECT_FALSE(r.empty_region);
  EXPECT_EQ(r.truth, region);
  const auto outside = normalize_variance(base);
  for (std::size_t i = 0; i < r.field.size(); ++i) {
    if (!region[i]) EXPECT_DOUBLE_EQ(r.field.values()[i], outside.values()[i]);
  }
  const auto inside = normalize_variance(synthesize_power_law_field(spec, {1.0, 1.8}, 2));
  EXPECT_NEAR(variance(inside.values()), 1.0, 1e-6);
}

TEST(EmbedAnomaly, EmptyRegionLeavesBase) {
  const auto base = synthesize_power_law_field({64, 64, 1.0}, {1.0, 0.8}, 1);
  const auto r = embed_anomaly(base, BinaryMask(64, 64), {1.0, 1.8}, 4.0, 2);
  EXPECT_TRUE(r.empty_region);
  EXPECT_TRUE(std::equal(base.values().begin(), base.values().end(), r.field.values().begin()));
}

TEST(EmbedAnomaly, RejectsBadArguments) {
  const auto base = synthesize_power_law_field({64, 64, 1.0}, {1.0, 0.8}, 1);
  const auto region = ellipse_mask(64, 64, 32, 32, 10, 10);
  EXPECT_THROW(embed_anomaly(base, region, {1.0, 0.0}, 4.0, 2), DomainError);
  EXPECT_THROW(embed_anomaly(base, ellipse_mask(32, 32, 16, 16, 5, 5), {1.0, 1.0}, 4.0, 2), DimensionError);
}

TEST(Speckle, GammaMoments) {
  for (int looks : {1, 4}) {
    const auto f = apply_speckle(FieldGrid::constant({256, 256, 1.0}, 0.0), looks, 17);
    EXPECT_NEAR(mean(f.values()), 1.0, 0.01);
    EXPECT_NEAR(variance(f.values()), 1.0 / looks, 0.03 / looks);
    EXPECT_GT(*std::min_element(f.values().begin(), f.values().end()), 0.0);
  }
  EXPECT_THROW(apply_speckle(FieldGrid::constant({16, 16, 1.0}, 0.0), 0, 1), ConfigError);
}

TEST(RadialCorrelation, MatchesBruteForce) {
  const auto f = test_support::random_field(20, 18, 4);
  const int max_lag = 6;
  const auto profile = radial_correlation(f, max_lag);
  const double m = mean(f.values());
  std::map<long, double> sums;
  std::map<long, std::uint64_t> counts;
  for (int dy = -max_lag; dy <= max_lag; ++dy) {
    for (int dx = -max_lag; dx <= max_lag; ++dx) {
      const long bin = std::lround(std::hypot(dx, dy));
      if (bin > max_lag) continue;
      for (int r = 0; r < f.height(); ++r) {
        for (int c = 0; c < f.width(); ++c) {
          const int r2 = r + dy;
          const int c2 = c + dx;
          if (r2 < 0 || c2 < 0 || r2 >= f.height() || c2 >= f.width()) continue;
          sums[bin] += (f(r, c) - m) * (f(r2, c2) - m);
          ++counts[bin];
        }
      }
    }
  }
  ASSERT_EQ(profile.values.size(), static_cast<std::size_t>(max_lag + 1));
  for (int k = 0; k <= max_lag; ++k) {
    EXPECT_EQ(profile.count_per_lag[k], counts[k]);
    EXPECT_NEAR(profile.values[k], sums[k] / static_cast<double>(counts[k]), 1e-10);
  }
  EXPECT_NEAR(profile.values[0], variance(f.values()), 1e-10);
}

TEST(RadialCorrelation, RejectsDegenerateInput) {
  EXPECT_THROW(radial_correlation(FieldGrid::constant({32, 32, 1.0}, 1.0), 4), DegenerateError);
  EXPECT_THROW(radial_correlation(test_support::random_field(32, 32, 1), 16), ConfigError);
}

TEST(LrdStatistic, PartialIntegrals) {
  CorrelationProfile p;
  p.lags = {0, 1, 2, 3};
  p.values = {1.0, -0.5, 0.25, 0.125};
  p.count_per_lag = {1, 1, 1, 1};
  const std::vector<double> radii{1.0, 3.0};
  const auto s = lrd_divergence_statistic(p, radii);
  const double tau = 2.0 * std::numbers::pi;
  EXPECT_NEAR(s[0], tau * 0.5, 1e-12);
  EXPECT_NEAR(s[1], tau * (0.5 + 0.5 + 0.375), 1e-12);
  const std::vector<double> bad{2.0, 1.0};
  EXPECT_THROW(lrd_divergence_statistic(p, bad), ConfigError);
  const std::vector<double> far{5.0};
  EXPECT_THROW(lrd_divergence_statistic(p, far), ConfigError);
}
