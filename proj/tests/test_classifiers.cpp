#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "fracsar/error.hpp"
#include "fracsar/lrt.hpp"
#include "fracsar/mlp.hpp"

using namespace fracsar;

namespace {

FeatureSet gaussian_blob(std::size_t n, std::vector<double> mean, double sd, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  FeatureSet f;
  f.dim = mean.size();
  std::vector<double> x(f.dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < f.dim; ++d) x[d] = mean[d] + sd * n01(rng);
    f.push(x, i);
  }
  return f;
}

struct Labeled {
  FeatureSet features;
  std::vector<std::uint8_t> labels;
};

Labeled two_blobs(std::size_t per_class, std::uint64_t seed, double scale = 1.0) {
  const auto a = gaussian_blob(per_class, {0.0, 0.0, 0.0}, scale * 0.5, seed);
  const auto b = gaussian_blob(per_class, {3.0 * scale, 2.0 * scale, -1.0 * scale}, scale * 0.5, seed + 1);
  Labeled out;
  out.features.dim = 3;
  for (std::size_t i = 0; i < per_class; ++i) {
    out.features.push(a.row(i));
    out.labels.push_back(0);
    out.features.push(b.row(i));
    out.labels.push_back(1);
  }
  return out;
}

FeatureSet scaled(const FeatureSet& f, double c) {
  FeatureSet out = f;
  for (auto& v : out.values) v *= c;
  return out;
}

}  // namespace

TEST(Lrt, MatchesLinearDiscriminantForEqualCovariances) {
  Eigen::MatrixXd cov(3, 3);
  cov << 2.0, 0.3, -0.2, 0.3, 1.0, 0.1, -0.2, 0.1, 0.5;
  GaussianLrtModel m;
  m.sea.mean = Eigen::Vector3d(0.1, -0.4, 1.0);
  m.oil.mean = Eigen::Vector3d(1.5, 0.2, 0.7);
  m.sea.cov = cov;
  m.oil.cov = cov;
  const Eigen::MatrixXd inv = cov.inverse();
  const Eigen::VectorXd w = inv * (m.oil.mean - m.sea.mean);
  const double b = -0.5 * (m.oil.mean.dot(inv * m.oil.mean) - m.sea.mean.dot(inv * m.sea.mean));
  const auto x = gaussian_blob(500, {0.5, 0.0, 0.5}, 2.0, 3);
  const auto s = lrt_score(x, m);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Eigen::Map<const Eigen::VectorXd> xi(x.row(i).data(), 3);
    EXPECT_NEAR(s[i], w.dot(xi) + b, 1e-9);
  }
}

TEST(Lrt, ThresholdMeetsTargetFalseAlarmRate) {
  const auto sea = gaussian_blob(200000, {0.0}, 1.0, 11);
  const auto oil = gaussian_blob(200000, {3.0}, 1.0, 12);
  const auto m = fit_lrt(sea, oil, 0.05, 4);
  EXPECT_NEAR(m.heldout_far, 0.05, 1e-3);
  // Equal unit variances: score = 3x - 4.5, so the threshold sits near 3 z(0.95) - 4.5.
  EXPECT_NEAR(m.threshold, 3.0 * 1.6448536269514722 - 4.5, 0.05);
  const auto fresh = gaussian_blob(200000, {0.0}, 1.0, 13);
  const auto scores = lrt_score(fresh, m);
  const double far = static_cast<double>(std::count_if(scores.begin(), scores.end(),
                                                        [&](double v) { return v > m.threshold; })) /
                     static_cast<double>(scores.size());
  EXPECT_NEAR(far, 0.05, 0.005);
  EXPECT_TRUE(m.separable);
  EXPECT_GT(m.detection_rate, 0.9);
}

TEST(Lrt, IdenticalClassesAreNotSeparable) {
  const auto sea = gaussian_blob(2000, {1.0, 2.0}, 1.0, 21);
  const auto m = fit_lrt(sea, sea, 0.05, 1);
  EXPECT_FALSE(m.separable);
}

TEST(Lrt, ScoresAreScaleInvariant) {
  const auto sea = gaussian_blob(3000, {0.0, 1.0}, 1.0, 31);
  const auto oil = gaussian_blob(3000, {2.0, 0.0}, 0.7, 32);
  const auto probe = gaussian_blob(200, {1.0, 0.5}, 1.5, 33);
  const auto m1 = fit_lrt(sea, oil, 0.05, 2);
  const auto m4 = fit_lrt(scaled(sea, 4.0), scaled(oil, 4.0), 0.05, 2);
  const auto s1 = lrt_score(probe, m1);
  const auto s4 = lrt_score(scaled(probe, 4.0), m4);
  for (std::size_t i = 0; i < s1.size(); ++i) EXPECT_NEAR(s1[i], s4[i], 1e-9 * (1.0 + std::abs(s1[i])));
  EXPECT_NEAR(m1.threshold, m4.threshold, 1e-9 * (1.0 + std::abs(m1.threshold)));
}

TEST(Lrt, RegularizesSingularCovariance) {
  auto sea = gaussian_blob(200, {0.0, 0.0}, 1.0, 41);
  for (std::size_t i = 0; i < sea.size(); ++i) sea.values[2 * i + 1] = 2.0 * sea.values[2 * i];
  const auto g = fit_gaussian(sea);
  EXPECT_GT(g.regularization, 0.0);
  EXPECT_TRUE(std::isfinite(g.log_density(Eigen::Vector2d(0.5, 1.0))));
}

TEST(Lrt, RejectsTooFewSamples) {
  const auto a = gaussian_blob(19, {0.0, 0.0}, 1.0, 1);
  const auto b = gaussian_blob(100, {1.0, 1.0}, 1.0, 2);
  EXPECT_THROW(fit_lrt(a, b, 0.05), DataError);
  EXPECT_THROW(fit_lrt(b, b, 0.0), ConfigError);
}

TEST(Mlp, AnalyticGradientMatchesFiniteDifferences) {
  const auto data = two_blobs(50, 5);
  auto model = init_mlp(3, 9);
  model.input_mean = Eigen::Vector3d(1.0, 0.5, -0.5);
  model.input_scale = Eigen::Vector3d(1.5, 1.2, 0.8);
  const auto params = flatten_parameters(model);
  const auto grad = mlp_loss_gradient(model, data.features, data.labels);
  ASSERT_EQ(grad.size(), params.size());
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> pick(0, params.size() - 1);
  const double h = 1e-4;
  for (int k = 0; k < 32; ++k) {
    const std::size_t j = pick(rng);
    auto p = params;
    p[j] = params[j] + h;
    set_parameters(model, p);
    const double up = mlp_loss(model, data.features, data.labels);
    p[j] = params[j] - h;
    set_parameters(model, p);
    const double down = mlp_loss(model, data.features, data.labels);
    set_parameters(model, params);
    const double fd = (up - down) / (2.0 * h);
    EXPECT_LT(std::abs(fd - grad[j]) / std::max(std::abs(fd) + std::abs(grad[j]), 1e-8), 1e-4) << "param " << j;
  }
}

TEST(Mlp, SeparatesBlobs) {
  const auto train = two_blobs(500, 1);
  const auto test = two_blobs(500, 100);
  const auto model = train_mlp(train.features, train.labels, {.epochs = 50, .learning_rate = 0.5, .batch_size = 32, .seed = 3});
  const auto s = mlp_score(test.features, model);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < s.size(); ++i) correct += ((s[i] > 0.5) == (test.labels[i] == 1)) ? 1 : 0;
  EXPECT_GE(static_cast<double>(correct) / static_cast<double>(s.size()), 0.99);
  EXPECT_FALSE(model.class_imbalance);
  EXPECT_EQ(model.epoch_losses.size(), 50u);
  EXPECT_EQ(model.final_loss, model.epoch_losses.back());
}

TEST(Mlp, AllOneLabelsFlagImbalance) {
  const auto data = two_blobs(100, 2);
  const std::vector<std::uint8_t> ones(data.labels.size(), 1);
  const auto model = train_mlp(data.features, ones, {.epochs = 5, .learning_rate = 0.5, .batch_size = 16, .seed = 1});
  EXPECT_TRUE(model.class_imbalance);
  for (double v : mlp_score(data.features, model)) EXPECT_TRUE(std::isfinite(v));
}

TEST(Mlp, ScoresDoNotDependOnBatchComposition) {
  const auto data = two_blobs(200, 4);
  const auto model = train_mlp(data.features, data.labels, {.epochs = 10, .learning_rate = 0.5, .batch_size = 32, .seed = 2});
  const auto all = mlp_score(data.features, model);
  for (std::size_t i = 0; i < data.features.size(); ++i) {
    FeatureSet one;
    one.dim = 3;
    one.push(data.features.row(i));
    EXPECT_EQ(mlp_score(one, model)[0], all[i]);
  }
}

TEST(Mlp, ZeroWeightsScoreOneHalf) {
  auto model = init_mlp(3, 1);
  set_parameters(model, std::vector<double>(model.parameter_count(), 0.0));
  const auto data = two_blobs(20, 8);
  for (double v : mlp_score(data.features, model)) EXPECT_EQ(v, 0.5);
  EXPECT_NEAR(mlp_loss(model, data.features, data.labels), std::log(2.0), 1e-12);
}

TEST(Mlp, FullBatchLossIsNonIncreasing) {
  const auto data = two_blobs(100, 6);
  const auto model = train_mlp(data.features, data.labels,
                               {.epochs = 40, .learning_rate = 0.05, .batch_size = static_cast<int>(data.labels.size()), .seed = 5});
  for (std::size_t e = 1; e < model.epoch_losses.size(); ++e) {
    EXPECT_LE(model.epoch_losses[e], model.epoch_losses[e - 1] + 1e-12) << "epoch " << e;
  }
}

TEST(Mlp, ScoresAreScaleInvariant) {
  const auto data = two_blobs(200, 7);
  const MlpHyper hyper{.epochs = 10, .learning_rate = 0.5, .batch_size = 32, .seed = 9};
  const auto m1 = train_mlp(data.features, data.labels, hyper);
  const auto m4 = train_mlp(scaled(data.features, 4.0), data.labels, hyper);
  const auto s1 = mlp_score(data.features, m1);
  const auto s4 = mlp_score(scaled(data.features, 4.0), m4);
  for (std::size_t i = 0; i < s1.size(); ++i) EXPECT_NEAR(s1[i], s4[i], 1e-9);
}

TEST(Mlp, Deterministic) {
  const auto data = two_blobs(100, 3);
  const MlpHyper hyper{.epochs = 5, .learning_rate = 0.5, .batch_size = 16, .seed = 4};
  EXPECT_EQ(flatten_parameters(train_mlp(data.features, data.labels, hyper)),
            flatten_parameters(train_mlp(data.features, data.labels, hyper)));
}

TEST(Mlp, RejectsBadInput) {
  const auto data = two_blobs(10, 1);
  EXPECT_THROW(train_mlp(data.features, std::vector<std::uint8_t>(3, 0), {}), DimensionError);
  EXPECT_THROW(train_mlp(data.features, data.labels, {.epochs = 0}), ConfigError);
  auto bad = data.features;
  bad.values[0] = std::nan("");
  EXPECT_THROW(train_mlp(bad, data.labels, {}), DataError);
}
