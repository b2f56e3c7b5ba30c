#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "fracsar/error.hpp"
#include "fracsar/filterbank.hpp"
#include "support.hpp"

using namespace fracsar;

namespace {

// Spatial kernel by direct inverse DFT of the real, even response.
std::vector<double> spatial_kernel(const WaveletKernel& k) {
  const int h = k.spec().height;
  const int w = k.spec().width;
  std::vector<double> out(static_cast<std::size_t>(h) * w, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
          const double phase = 2.0 * std::numbers::pi * (static_cast<double>(r) * y / h + static_cast<double>(c) * x / w);
          acc += k.response(r, c) * std::cos(phase);
        }
      }
      out[static_cast<std::size_t>(y) * w + x] = acc / (static_cast<double>(h) * w);
    }
  }
  return out;
}

}  // namespace

TEST(LogKernel, MatchesCircularConvolution) {
  for (auto [w, h] : {std::pair{16, 16}, std::pair{32, 24}, std::pair{20, 32}}) {
    const GridSpec spec{w, h, 1.0};
    const auto field = test_support::random_field(w, h, 42);
    for (const auto& kernel : {build_log_kernel(spec, 1.5), dilate_kernel(build_log_kernel(spec, 1.0))}) {
      const auto g = spatial_kernel(kernel);
      const auto fast = apply_filter(field, kernel);
      double max_err = 0.0;
      double max_ref = 0.0;
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          double acc = 0.0;
          for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
              const int dy = ((y - r) % h + h) % h;
              const int dx = ((x - c) % w + w) % w;
              acc += field(r, c) * g[static_cast<std::size_t>(dy) * w + dx];
            }
          }
          max_err = std::max(max_err, std::abs(acc - fast(y, x)));
          max_ref = std::max(max_ref, std::abs(acc));
        }
      }
      EXPECT_LT(max_err, 1e-9 * max_ref) << w << "x" << h << " scale " << kernel.scale();
    }
  }
}

TEST(LogKernel, DcResponseIsExactlyZero) {
  const auto k = build_log_kernel({64, 64, 0.5}, 2.0);
  EXPECT_EQ(k.response(0, 0), 0.0);
  EXPECT_EQ(dilate_kernel(k).response(0, 0), 0.0);
}

TEST(LogKernel, DilationIdentityIsExactPerBin) {
  const GridSpec spec{128, 96, 1.0};
  const auto base = build_log_kernel(spec, 2.0);
  const auto dilated = dilate_kernel(base);
  EXPECT_EQ(dilated.scale(), 4.0);
  EXPECT_EQ(dilated.gain(), 4.0);
  for (int r = 0; r < spec.height; ++r) {
    for (int c = 0; c < spec.width; ++c) {
      EXPECT_EQ(dilated.response(r, c), 4.0 * base.evaluate(2.0 * radial_frequency(spec, r, c)));
    }
  }
}

TEST(LogKernel, PeakAtSqrtTwoOverScale) {
  const auto k = build_log_kernel({64, 64, 1.0}, 3.0);
  const double peak = std::sqrt(2.0) / 3.0;
  EXPECT_GT(k.evaluate(peak), k.evaluate(peak * 0.99));
  EXPECT_GT(k.evaluate(peak), k.evaluate(peak * 1.01));
  EXPECT_NEAR(k.evaluate(peak), 2.0 * std::exp(-1.0), 1e-15);
}

TEST(LogKernel, SquaredResponseIntegralMatchesParseval) {
  // Continuous integral of |H|^2 over the plane: 2 pi / s^2 for the unit-gain profile.
  const GridSpec spec{256, 256, 1.0};
  const double s = 4.0;
  const auto k = build_log_kernel(spec, s);
  const double dw = frequency_step(256, 1.0);
  double sum = 0.0;
  for (double v : k.response()) sum += v * v;
  const double discrete = sum * dw * dw;
  EXPECT_NEAR(discrete / (2.0 * std::numbers::pi / (s * s)), 1.0, 0.02);
  // Spatial energy equals the spectral mean of |H|^2.
  const auto impulse = [&] {
    std::vector<double> v(spec.pixel_count(), 0.0);
    v[0] = 1.0;
    return FieldGrid(spec, v);
  }();
  const auto g = apply_filter(impulse, k);
  double energy = 0.0;
  for (double v : g.values()) energy += v * v;
  EXPECT_NEAR(energy, sum / static_cast<double>(spec.pixel_count()), 1e-12 * energy);
}

TEST(LogKernel, ScaleLimits) {
  const GridSpec spec{64, 64, 1.0};
  EXPECT_NO_THROW(build_log_kernel(spec, 8.0));
  EXPECT_THROW(build_log_kernel(spec, 8.5), DomainError);
  EXPECT_THROW(build_log_kernel(spec, 0.0), DomainError);
}

TEST(FilterBank, ValidatesScales) {
  const GridSpec spec{128, 128, 1.0};
  EXPECT_THROW(FilterBank(spec, {2.0, 4.0}), ConfigError);
  EXPECT_THROW(FilterBank(spec, {2.0, 2.0, 4.0}), ConfigError);
  FilterBank bank(spec, {1.0, 2.0, 4.0});
  EXPECT_EQ(bank.size(), 3u);
  EXPECT_EQ(bank.pair(2).dilated.scale(), 8.0);
  EXPECT_THROW(bank.pair(3), ConfigError);
  EXPECT_EQ(parse_kernel_family("log"), KernelFamily::LaplacianOfGaussian);
  EXPECT_THROW(parse_kernel_family("haar"), ConfigError);
}

TEST(FilterBank, PairMatchesSeparateFiltering) {
  const auto field = test_support::random_field(64, 64, 3);
  FilterBank bank(field.spec(), {1.0, 2.0, 4.0});
  const auto p = filter_pair(field, bank, 1);
  const auto y1 = apply_filter(field, bank.pair(1).base);
  const auto y2 = apply_filter(field, bank.pair(1).dilated);
  for (std::size_t i = 0; i < field.size(); ++i) {
    EXPECT_NEAR(p.y1.values()[i], y1.values()[i], 1e-12);
    EXPECT_NEAR(p.y2.values()[i], y2.values()[i], 1e-12);
  }
  EXPECT_THROW(apply_filter(test_support::random_field(32, 32, 1), bank.pair(0).base), DimensionError);
}
