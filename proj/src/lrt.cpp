#include "fracsar/lrt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "fracsar/error.hpp"

namespace fracsar {

namespace {

// Cholesky-backed evaluator for repeated log-density calls.
class GaussianEvaluator {
 public:
  explicit GaussianEvaluator(const GaussianClass& g) : mean_(g.mean), llt_(g.cov) {
    if (llt_.info() != Eigen::Success) throw DegenerateError("class covariance is not positive definite");
    const Eigen::MatrixXd l = llt_.matrixL();
    log_norm_ = 0.5 * static_cast<double>(mean_.size()) * std::log(2.0 * std::numbers::pi);
    for (Eigen::Index i = 0; i < l.rows(); ++i) log_norm_ += std::log(l(i, i));
  }

  double operator()(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd y = llt_.matrixL().solve(x - mean_);
    return -0.5 * y.squaredNorm() - log_norm_;
  }

 private:
  Eigen::VectorXd mean_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double log_norm_ = 0.0;
};

bool factors(const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) return false;
  const Eigen::MatrixXd l = llt.matrixL();
  return (l.diagonal().array() > 0.0).all() && l.allFinite();
}

Eigen::VectorXd as_vector(std::span<const double> x) {
  return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

FeatureSet subset(const FeatureSet& src, std::span<const std::size_t> rows) {
  FeatureSet out;
  out.dim = src.dim;
  for (std::size_t r : rows) out.push(src.row(r), src.pixels.empty() ? 0 : src.pixels[r]);
  return out;
}

}  // namespace

double GaussianClass::log_density(const Eigen::VectorXd& x) const {
  return GaussianEvaluator(*this)(x);
}

GaussianClass fit_gaussian(const FeatureSet& samples) {
  const auto n = samples.size();
  const auto d = static_cast<Eigen::Index>(samples.dim);
  if (n < 2) throw DataError("need at least two samples to fit a Gaussian");
  GaussianClass g;
  g.mean = Eigen::VectorXd::Zero(d);
  for (std::size_t i = 0; i < n; ++i) g.mean += as_vector(samples.row(i));
  g.mean /= static_cast<double>(n);
  g.cov = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXd c = as_vector(samples.row(i)) - g.mean;
    g.cov.noalias() += c * c.transpose();
  }
  g.cov /= static_cast<double>(n - 1);
  if (!factors(g.cov)) {
    g.regularization = 1e-6 * g.cov.trace() / static_cast<double>(d);
    g.cov.diagonal().array() += g.regularization;
    if (!(g.regularization > 0.0) || !factors(g.cov)) {
      throw DegenerateError("class covariance is singular even after regularization");
    }
  }
  return g;
}

GaussianLrtModel fit_lrt(const FeatureSet& sea, const FeatureSet& oil, double target_far,
                         std::uint64_t seed) {
  if (sea.dim != oil.dim || sea.dim == 0) throw DimensionError("class feature dimensions differ");
  if (!(target_far > 0.0 && target_far < 1.0)) throw ConfigError("target_far must lie in (0, 1)");
  const std::size_t need = 10 * sea.dim;
  if (sea.size() < need || oil.size() < need) {
    throw DataError("LRT training needs at least " + std::to_string(need) + " samples per class");
  }

  std::vector<std::size_t> order(sea.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto heldout_count = static_cast<std::size_t>(std::ceil(0.2 * static_cast<double>(order.size())));
  const std::span<const std::size_t> heldout(order.data(), heldout_count);
  const std::span<const std::size_t> train(order.data() + heldout_count, order.size() - heldout_count);

  GaussianLrtModel model;
  model.sea = fit_gaussian(subset(sea, train));
  model.oil = fit_gaussian(oil);
  model.target_far = target_far;
  model.seed = seed;

  auto held_scores = lrt_score(subset(sea, heldout), model);
  std::sort(held_scores.begin(), held_scores.end());
  const std::size_t m = held_scores.size();
  const auto above = static_cast<std::size_t>(std::lround(target_far * static_cast<double>(m)));
  if (above == 0) {
    model.threshold = held_scores.back();
  } else if (above >= m) {
    model.threshold = held_scores.front() - 1.0;
  } else {
    model.threshold = 0.5 * (held_scores[m - above - 1] + held_scores[m - above]);
  }
  const auto count_above = [&](const std::vector<double>& s) {
    return static_cast<double>(std::count_if(s.begin(), s.end(), [&](double v) { return v > model.threshold; }));
  };
  model.heldout_far = count_above(held_scores) / static_cast<double>(m);
  const auto oil_scores = lrt_score(oil, model);
  model.detection_rate = count_above(oil_scores) / static_cast<double>(oil_scores.size());
  const double spread = held_scores.back() - held_scores.front();
  model.separable = spread > 1e-9 && model.detection_rate - model.heldout_far > 0.1;
  return model;
}

std::vector<double> lrt_score(const FeatureSet& features, const GaussianLrtModel& model) {
  if (features.dim != model.dim()) throw DimensionError("feature dimension does not match the LRT model");
  const GaussianEvaluator sea(model.sea);
  const GaussianEvaluator oil(model.oil);
  std::vector<double> out(features.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Eigen::VectorXd x = as_vector(features.row(i));
    out[i] = oil(x) - sea(x);
  }
  return out;
}

}  // namespace fracsar
