#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "fracsar/detection.hpp"

namespace fracsar {

/// One class-conditional Gaussian, with its Cholesky factor cached.
struct GaussianClass {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  /// Ridge lambda added to the diagonal; 0 when the sample covariance factored.
  double regularization = 0.0;

  /// log N(x; mean, cov).
  double log_density(const Eigen::VectorXd& x) const;
};

/// Two-class Gaussian log-likelihood-ratio test, oil versus sea.
struct GaussianLrtModel {
  GaussianClass sea;
  GaussianClass oil;
  /// Decision level on log N_oil - log N_sea.
  double threshold = 0.0;
  double target_far = 0.05;
  /// Empirical false-alarm rate of the threshold on the held-out sea split.
  double heldout_far = 0.0;
  /// Fraction of oil samples above the threshold.
  double detection_rate = 0.0;
  /// False when the oil samples are not detected clearly above the
  /// false-alarm level (e.g. the two classes coincide).
  bool separable = true;
  std::uint64_t seed = 0;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(sea.mean.size()); }
};

/// Sample mean and unbiased covariance; regularized by (1e-6 * trace / n) I
/// when Cholesky fails. Throws DegenerateError if it still fails.
GaussianClass fit_gaussian(const FeatureSet& samples);

/// The sea class is fitted on a seeded 80% split; the threshold is placed so
/// that target_far of the remaining 20% score above it. Requires >= 10*dim
/// samples per class.
GaussianLrtModel fit_lrt(const FeatureSet& sea, const FeatureSet& oil, double target_far,
                         std::uint64_t seed = 0);

std::vector<double> lrt_score(const FeatureSet& features, const GaussianLrtModel& model);

}  // namespace fracsar

namespace fracsar {

/// classify() with the LRT decision level taken from a fitted model.
inline DetectionMask classify(const GridSpec& spec, std::vector<double> scores_nn,
                              std::vector<double> scores_lrt, double nn_threshold,
                              const GaussianLrtModel& lrt_model, Combiner combiner,
                              int min_region_area) {
  return classify(spec, std::move(scores_nn), std::move(scores_lrt), nn_threshold,
                  lrt_model.threshold, combiner, min_region_area);
}

}  // namespace fracsar
