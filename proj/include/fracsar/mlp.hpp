#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fracsar/detection.hpp"

namespace fracsar {

struct MlpHyper {
  int epochs = 200;
  double learning_rate = 0.5;
  int batch_size = 64;
  std::uint64_t seed = 1;
};

/// Feed-forward network [n, 8, 1] with logistic activation on every layer.
/// Inputs are standardized with statistics captured at training time.
struct MlpModel {
  std::vector<int> layer_dims;
  std::vector<Eigen::MatrixXd> weights;  // weights[l]: dims[l+1] x dims[l]
  std::vector<Eigen::VectorXd> biases;
  Eigen::VectorXd input_mean;
  Eigen::VectorXd input_scale;
  MlpHyper hyper;
  double final_loss = 0.0;
  /// Full-set cross-entropy after each epoch.
  std::vector<double> epoch_losses;
  /// Set when a class made up less than 5% of the training labels.
  bool class_imbalance = false;

  std::size_t input_dim() const noexcept { return static_cast<std::size_t>(layer_dims.front()); }
  std::size_t parameter_count() const noexcept;
};

inline constexpr int kHiddenUnits = 8;

/// Seeded initialization, weights ~ N(0, 1/fan_in), zero biases, identity
/// standardization.
MlpModel init_mlp(std::size_t input_dim, std::uint64_t seed);

/// Flat parameter vector: for each layer, weights row-major then biases.
std::vector<double> flatten_parameters(const MlpModel& model);
void set_parameters(MlpModel& model, std::span<const double> params);

/// Mean binary cross-entropy over the samples.
double mlp_loss(const MlpModel& model, const FeatureSet& features,
                std::span<const std::uint8_t> labels);
/// Analytic gradient of mlp_loss, laid out like flatten_parameters.
std::vector<double> mlp_loss_gradient(const MlpModel& model, const FeatureSet& features,
                                      std::span<const std::uint8_t> labels);

/// Mini-batch gradient descent on cross-entropy. Deterministic in hyper.seed.
/// Throws TrainingError on a non-finite loss.
MlpModel train_mlp(const FeatureSet& features, std::span<const std::uint8_t> labels,
                   const MlpHyper& hyper);

/// Forward pass; one output in [0, 1] per sample.
std::vector<double> mlp_score(const FeatureSet& features, const MlpModel& model);

}  // namespace fracsar
