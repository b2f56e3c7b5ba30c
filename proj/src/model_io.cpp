#include "fracsar/model_io.hpp"

#include "fracsar/error.hpp"
#include "fracsar/raster_io.hpp"

namespace fracsar {

using nlohmann::json;

namespace {

constexpr const char* kModelFormat = "fracsar-detection-model";
constexpr int kModelVersion = 1;

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
    rows.push_back(row);
  }
  return rows;
}

Eigen::VectorXd vector_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd matrix_from(const json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto m = n == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(rows.front().size());
  Eigen::MatrixXd out(n, m);
  for (Eigen::Index r = 0; r < n; ++r) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)].size()) != m) {
      throw DataError("ragged matrix in model file");
    }
    for (Eigen::Index c = 0; c < m; ++c) out(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  }
  return out;
}

json gaussian_json(const GaussianClass& g) {
  return {{"mean", vector_json(g.mean)}, {"covariance", matrix_json(g.cov)}, {"regularization", g.regularization}};
}

GaussianClass gaussian_from(const json& j) {
  GaussianClass g;
  g.mean = vector_from(j.at("mean"));
  g.cov = matrix_from(j.at("covariance"));
  g.regularization = j.at("regularization").get<double>();
  if (g.cov.rows() != g.mean.size() || g.cov.cols() != g.mean.size()) {
    throw DataError("class covariance does not match its mean");
  }
  return g;
}

}  // namespace

json model_to_json(const DetectionModel& model) {
  const auto& mlp = model.mlp;
  json layers = json::array();
  for (std::size_t l = 0; l < mlp.weights.size(); ++l) {
    layers.push_back({{"weights", matrix_json(mlp.weights[l])}, {"biases", vector_json(mlp.biases[l])}});
  }
  const auto& lrt = model.lrt;
  return {
      {"format", kModelFormat},
      {"version", kModelVersion},
      {"config", to_json(model.config)},
      {"lrt",
       {{"sea", gaussian_json(lrt.sea)},
        {"oil", gaussian_json(lrt.oil)},
        {"threshold", lrt.threshold},
        {"target_far", lrt.target_far},
        {"heldout_far", lrt.heldout_far},
        {"detection_rate", lrt.detection_rate},
        {"separable", lrt.separable},
        {"seed", lrt.seed}}},
      {"mlp",
       {{"layer_dims", mlp.layer_dims},
        {"activation", "logistic"},
        {"layers", layers},
        {"input_mean", vector_json(mlp.input_mean)},
        {"input_scale", vector_json(mlp.input_scale)},
        {"training",
         {{"epochs", mlp.hyper.epochs},
          {"learning_rate", mlp.hyper.learning_rate},
          {"batch_size", mlp.hyper.batch_size},
          {"seed", mlp.hyper.seed},
          {"final_loss", mlp.final_loss},
          {"class_imbalance", mlp.class_imbalance}}}}},
  };
}

DetectionModel model_from_json(const json& j) {
  DetectionModel model;
  try {
    if (j.at("format").get<std::string>() != kModelFormat) throw DataError("not a detection model file");
    if (j.at("version").get<int>() != kModelVersion) throw DataError("unsupported model version");
    model.config = config_from_json(j.at("config"));

    const auto& l = j.at("lrt");
    model.lrt.sea = gaussian_from(l.at("sea"));
    model.lrt.oil = gaussian_from(l.at("oil"));
    model.lrt.threshold = l.at("threshold").get<double>();
    model.lrt.target_far = l.at("target_far").get<double>();
    model.lrt.heldout_far = l.at("heldout_far").get<double>();
    model.lrt.detection_rate = l.at("detection_rate").get<double>();
    model.lrt.separable = l.at("separable").get<bool>();
    model.lrt.seed = l.at("seed").get<std::uint64_t>();

    const auto& m = j.at("mlp");
    model.mlp.layer_dims = m.at("layer_dims").get<std::vector<int>>();
    if (m.at("activation").get<std::string>() != "logistic") throw DataError("unsupported activation");
    for (const auto& layer : m.at("layers")) {
      model.mlp.weights.push_back(matrix_from(layer.at("weights")));
      model.mlp.biases.push_back(vector_from(layer.at("biases")));
    }
    model.mlp.input_mean = vector_from(m.at("input_mean"));
    model.mlp.input_scale = vector_from(m.at("input_scale"));
    const auto& t = m.at("training");
    model.mlp.hyper.epochs = t.at("epochs").get<int>();
    model.mlp.hyper.learning_rate = t.at("learning_rate").get<double>();
    model.mlp.hyper.batch_size = t.at("batch_size").get<int>();
    model.mlp.hyper.seed = t.at("seed").get<std::uint64_t>();
    model.mlp.final_loss = t.at("final_loss").get<double>();
    model.mlp.class_imbalance = t.at("class_imbalance").get<bool>();
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }

  const auto& dims = model.mlp.layer_dims;
  if (dims.size() < 2 || model.mlp.weights.size() + 1 != dims.size()) throw DataError("model layer count mismatch");
  for (std::size_t i = 0; i < model.mlp.weights.size(); ++i) {
    if (model.mlp.weights[i].rows() != dims[i + 1] || model.mlp.weights[i].cols() != dims[i] ||
        model.mlp.biases[i].size() != dims[i + 1] || !model.mlp.weights[i].allFinite() ||
        !model.mlp.biases[i].allFinite()) {
      throw DataError("model layer " + std::to_string(i) + " has inconsistent or non-finite parameters");
    }
  }
  if (model.mlp.input_mean.size() != dims.front() || model.mlp.input_scale.size() != dims.front() ||
      static_cast<int>(model.lrt.dim()) != dims.front()) {
    throw DataError("model stages disagree on the feature dimension");
  }
  return model;
}

void save_model(const DetectionModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, model_to_json(model).dump(2) + "\n");
}

DetectionModel load_model(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw DataError("model file is not valid JSON: " + std::string(e.what()));
  }
  return model_from_json(j);
}

}  // namespace fracsar
