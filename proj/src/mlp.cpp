#include "fracsar/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fracsar/error.hpp"

namespace fracsar {

namespace {

constexpr std::uint64_t kShuffleStream = 0x9E3779B97F4A7C15ULL;

Eigen::ArrayXXd sigmoid(const Eigen::ArrayXXd& z) { return 1.0 / (1.0 + (-z).exp()); }

// Columns are samples.
Eigen::MatrixXd standardized_batch(const MlpModel& model, const FeatureSet& features,
                                   std::span<const std::size_t> rows) {
  const auto d = static_cast<Eigen::Index>(features.dim);
  Eigen::MatrixXd x(d, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto row = features.row(rows[k]);
    for (Eigen::Index j = 0; j < d; ++j) {
      x(j, static_cast<Eigen::Index>(k)) =
          (row[static_cast<std::size_t>(j)] - model.input_mean(j)) / model.input_scale(j);
    }
  }
  return x;
}

struct ForwardPass {
  std::vector<Eigen::MatrixXd> activations;  // activations[0] is the input
  Eigen::RowVectorXd logits;                 // pre-activation of the output unit
};

ForwardPass forward(const MlpModel& model, Eigen::MatrixXd input) {
  ForwardPass fp;
  fp.activations.push_back(std::move(input));
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    Eigen::MatrixXd z = model.weights[l] * fp.activations.back();
    z.colwise() += model.biases[l];
    if (l + 1 == model.weights.size()) fp.logits = z.row(0);
    fp.activations.push_back(sigmoid(z.array()).matrix());
  }
  return fp;
}

// Binary cross-entropy from logits, stable for large |z|.
double cross_entropy_sum(const Eigen::RowVectorXd& logits, std::span<const std::uint8_t> labels,
                         std::span<const std::size_t> rows) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < logits.size(); ++k) {
    const double z = logits(k);
    const double y = labels[rows[static_cast<std::size_t>(k)]] ? 1.0 : 0.0;
    s += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
  }
  return s;
}

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  double loss = 0.0;
};

Gradients backprop(const MlpModel& model, const FeatureSet& features,
                   std::span<const std::uint8_t> labels, std::span<const std::size_t> rows) {
  const auto fp = forward(model, standardized_batch(model, features, rows));
  const double inv_n = 1.0 / static_cast<double>(rows.size());
  Gradients g;
  g.loss = cross_entropy_sum(fp.logits, labels, rows) * inv_n;
  const std::size_t layers = model.weights.size();
  g.weights.resize(layers);
  g.biases.resize(layers);

  Eigen::MatrixXd delta = fp.activations.back();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    delta(0, static_cast<Eigen::Index>(k)) -= labels[rows[k]] ? 1.0 : 0.0;
  }
  delta *= inv_n;
  for (std::size_t l = layers; l-- > 0;) {
    g.weights[l] = delta * fp.activations[l].transpose();
    g.biases[l] = delta.rowwise().sum();
    if (l > 0) {
      const auto& a = fp.activations[l].array();
      delta = ((model.weights[l].transpose() * delta).array() * a * (1.0 - a)).matrix();
    }
  }
  return g;
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

void check_inputs(const MlpModel& model, const FeatureSet& features,
                  std::span<const std::uint8_t> labels) {
  if (features.dim != model.input_dim()) throw DimensionError("feature dimension does not match the network");
  if (labels.size() != features.size()) throw DimensionError("label count does not match the features");
}

}  // namespace

std::size_t MlpModel::parameter_count() const noexcept {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    n += static_cast<std::size_t>(weights[l].size() + biases[l].size());
  }
  return n;
}

MlpModel init_mlp(std::size_t input_dim, std::uint64_t seed) {
  if (input_dim == 0) throw ConfigError("network input dimension must be positive");
  MlpModel model;
  model.layer_dims = {static_cast<int>(input_dim), kHiddenUnits, 1};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t l = 0; l + 1 < model.layer_dims.size(); ++l) {
    const int fan_in = model.layer_dims[l];
    const int fan_out = model.layer_dims[l + 1];
    Eigen::MatrixXd w(fan_out, fan_in);
    const double sd = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) w(r, c) = sd * normal(rng);
    }
    model.weights.push_back(std::move(w));
    model.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  model.input_mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(input_dim));
  model.input_scale = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(input_dim));
  model.hyper.seed = seed;
  return model;
}

std::vector<double> flatten_parameters(const MlpModel& model) {
  std::vector<double> out;
  out.reserve(model.parameter_count());
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    const auto& w = model.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) out.push_back(w(r, c));
    }
    for (Eigen::Index r = 0; r < model.biases[l].size(); ++r) out.push_back(model.biases[l](r));
  }
  return out;
}

void set_parameters(MlpModel& model, std::span<const double> params) {
  if (params.size() != model.parameter_count()) throw DimensionError("parameter vector has the wrong length");
  std::size_t k = 0;
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    auto& w = model.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = params[k++];
    }
    for (Eigen::Index r = 0; r < model.biases[l].size(); ++r) model.biases[l](r) = params[k++];
  }
}

double mlp_loss(const MlpModel& model, const FeatureSet& features,
                std::span<const std::uint8_t> labels) {
  check_inputs(model, features, labels);
  const auto rows = all_rows(features.size());
  const auto fp = forward(model, standardized_batch(model, features, rows));
  return cross_entropy_sum(fp.logits, labels, rows) / static_cast<double>(rows.size());
}

std::vector<double> mlp_loss_gradient(const MlpModel& model, const FeatureSet& features,
                                      std::span<const std::uint8_t> labels) {
  check_inputs(model, features, labels);
  const auto g = backprop(model, features, labels, all_rows(features.size()));
  MlpModel shaped = model;
  shaped.weights = g.weights;
  shaped.biases = g.biases;
  return flatten_parameters(shaped);
}

MlpModel train_mlp(const FeatureSet& features, std::span<const std::uint8_t> labels,
                   const MlpHyper& hyper) {
  if (features.empty()) throw DataError("no training samples");
  if (hyper.epochs < 1 || hyper.batch_size < 1 || !(hyper.learning_rate > 0.0)) {
    throw ConfigError("epochs, batch size and learning rate must be positive");
  }
  MlpModel model = init_mlp(features.dim, hyper.seed);
  model.hyper = hyper;
  check_inputs(model, features, labels);
  if (!std::all_of(features.values.begin(), features.values.end(), [](double v) { return std::isfinite(v); })) {
    throw DataError("training features must be finite");
  }

  const std::size_t n = features.size();
  const auto d = static_cast<Eigen::Index>(features.dim);
  for (Eigen::Index j = 0; j < d; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += features.row(i)[static_cast<std::size_t>(j)];
    const double m = s / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = features.row(i)[static_cast<std::size_t>(j)] - m;
      ss += c * c;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n));
    model.input_mean(j) = m;
    model.input_scale(j) = sd > 0.0 ? sd : 1.0;
  }
  const auto positives = static_cast<double>(std::count_if(labels.begin(), labels.end(), [](auto v) { return v != 0; }));
  const double frac = positives / static_cast<double>(n);
  model.class_imbalance = frac < 0.05 || frac > 0.95;

  std::mt19937_64 shuffle_rng(hyper.seed ^ kShuffleStream);
  auto order = all_rows(n);
  const auto batch = static_cast<std::size_t>(hyper.batch_size);
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::span<const std::size_t> rows(order.data() + start, std::min(batch, n - start));
      const auto g = backprop(model, features, labels, rows);
      if (!std::isfinite(g.loss)) throw TrainingError("non-finite training loss", epoch);
      for (std::size_t l = 0; l < model.weights.size(); ++l) {
        model.weights[l] -= hyper.learning_rate * g.weights[l];
        model.biases[l] -= hyper.learning_rate * g.biases[l];
      }
    }
    const double loss = mlp_loss(model, features, labels);
    if (!std::isfinite(loss) || !model.weights.back().allFinite()) {
      throw TrainingError("non-finite training loss", epoch);
    }
    model.epoch_losses.push_back(loss);
  }
  model.final_loss = model.epoch_losses.back();
  return model;
}

std::vector<double> mlp_score(const FeatureSet& features, const MlpModel& model) {
  if (features.dim != model.input_dim()) throw DimensionError("feature dimension does not match the network");
  std::vector<double> out(features.size());
  std::vector<double> in, next;
  // Explicit fixed-order sums: a sample's score never depends on its batch.
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto row = features.row(i);
    in.resize(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      in[j] = (row[j] - model.input_mean(jj)) / model.input_scale(jj);
    }
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
      const auto& w = model.weights[l];
      next.resize(static_cast<std::size_t>(w.rows()));
      for (Eigen::Index r = 0; r < w.rows(); ++r) {
        double acc = model.biases[l](r);
        for (Eigen::Index c = 0; c < w.cols(); ++c) acc += w(r, c) * in[static_cast<std::size_t>(c)];
        next[static_cast<std::size_t>(r)] = 1.0 / (1.0 + std::exp(-acc));
      }
      in.swap(next);
    }
    out[i] = in[0];
  }
  return out;
}

}  // namespace fracsar
