#include "fracsar/config.hpp"

#include <cmath>
#include <set>

#include "fracsar/error.hpp"
#include "fracsar/filterbank.hpp"

namespace fracsar {

void PipelineConfig::validate() const {
  parse_kernel_family(kernel_family);
  if (scales.size() < 3) throw ConfigError("at least three scales are required");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0.0) || !std::isfinite(scales[i])) throw ConfigError("scales must be positive");
    if (i > 0 && !(scales[i] > scales[i - 1])) throw ConfigError("scales must be strictly increasing");
  }
  if (!(window_radius > 0.0) || !std::isfinite(window_radius)) throw ConfigError("window_radius must be positive");
  if (!(rgb_range.first < rgb_range.second) || !std::isfinite(rgb_range.first) ||
      !std::isfinite(rgb_range.second)) {
    throw ConfigError("rgb_range must be finite with min < max");
  }
  for (auto p : rgb_planes) {
    if (p >= scales.size()) throw ConfigError("rgb_planes index out of range");
  }
  if (std::set<std::size_t>(rgb_planes.begin(), rgb_planes.end()).size() != 3) {
    throw ConfigError("rgb_planes must be distinct");
  }
  if (!std::isfinite(adequacy_threshold) || adequacy_threshold < 0.0) {
    throw ConfigError("adequacy_threshold must be finite and non-negative");
  }
  if (mlp.epochs < 1 || mlp.batch_size < 1 || !(mlp.learning_rate > 0.0) ||
      !std::isfinite(mlp.learning_rate)) {
    throw ConfigError("mlp epochs, batch_size and learning_rate must be positive");
  }
  if (!std::isfinite(nn_threshold)) throw ConfigError("nn_threshold must be finite");
  if (!(target_far > 0.0 && target_far < 1.0)) throw ConfigError("target_far must lie in (0, 1)");
  if (min_region_area < 0) throw ConfigError("min_region_area must be non-negative");
  if (max_samples_per_class < 1) throw ConfigError("max_samples_per_class must be positive");
}

nlohmann::json to_json(const PipelineConfig& c) {
  return {
      {"kernel_family", c.kernel_family},
      {"scales", c.scales},
      {"window_radius", c.window_radius},
      {"rgb_range", {c.rgb_range.first, c.rgb_range.second}},
      {"rgb_planes", c.rgb_planes},
      {"include_adequacy", c.include_adequacy},
      {"adequacy_threshold", c.adequacy_threshold},
      {"mlp",
       {{"epochs", c.mlp.epochs},
        {"learning_rate", c.mlp.learning_rate},
        {"batch_size", c.mlp.batch_size},
        {"seed", c.mlp.seed}}},
      {"nn_threshold", c.nn_threshold},
      {"combiner", to_string(c.combiner)},
      {"target_far", c.target_far},
      {"min_region_area", c.min_region_area},
      {"max_samples_per_class", c.max_samples_per_class},
      {"seed", c.seed},
      {"log_transform", c.log_transform},
  };
}

PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig c) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "kernel_family") c.kernel_family = value.get<std::string>();
      else if (key == "scales") c.scales = value.get<std::vector<double>>();
      else if (key == "window_radius") c.window_radius = value.get<double>();
      else if (key == "rgb_range") {
        const auto r = value.get<std::vector<double>>();
        if (r.size() != 2) throw ConfigError("rgb_range needs two values");
        c.rgb_range = {r[0], r[1]};
      } else if (key == "rgb_planes") {
        const auto p = value.get<std::vector<std::size_t>>();
        if (p.size() != 3) throw ConfigError("rgb_planes needs three indices");
        c.rgb_planes = {p[0], p[1], p[2]};
      } else if (key == "include_adequacy") c.include_adequacy = value.get<bool>();
      else if (key == "adequacy_threshold") c.adequacy_threshold = value.get<double>();
      else if (key == "mlp") {
        for (const auto& [mk, mv] : value.items()) {
          if (mk == "epochs") c.mlp.epochs = mv.get<int>();
          else if (mk == "learning_rate") c.mlp.learning_rate = mv.get<double>();
          else if (mk == "batch_size") c.mlp.batch_size = mv.get<int>();
          else if (mk == "seed") c.mlp.seed = mv.get<std::uint64_t>();
          else throw ConfigError("unknown mlp key '" + mk + "'");
        }
      } else if (key == "nn_threshold") c.nn_threshold = value.get<double>();
      else if (key == "combiner") c.combiner = parse_combiner(value.get<std::string>());
      else if (key == "target_far") c.target_far = value.get<double>();
      else if (key == "min_region_area") c.min_region_area = value.get<int>();
      else if (key == "max_samples_per_class") c.max_samples_per_class = value.get<std::size_t>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "log_transform") c.log_transform = value.get<bool>();
      else throw ConfigError("unknown configuration key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("configuration type error: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace fracsar
