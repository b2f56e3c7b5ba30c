#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fracsar/detection.hpp"
#include "fracsar/mlp.hpp"

namespace fracsar {

/// Every tunable of the analysis and detection pipeline. Field names match
/// the keys of the JSON configuration file.
struct PipelineConfig {
  std::string kernel_family = "log";
  /// Base scales s_i in physical units; each is paired with 2 s_i.
  std::vector<double> scales{2.0, 4.0, 8.0};
  double window_radius = 96.0;
  std::pair<double, double> rgb_range{0.0, 3.0};
  std::array<std::size_t, 3> rgb_planes{0, 1, 2};
  bool include_adequacy = false;
  /// Decision level on the mean cross-scale dispersion reported by `estimate`.
  double adequacy_threshold = 0.3;
  MlpHyper mlp{.epochs = 60, .learning_rate = 0.5, .batch_size = 64, .seed = 1};
  double nn_threshold = 0.5;
  Combiner combiner = Combiner::And;
  double target_far = 0.05;
  int min_region_area = 32;
  std::size_t max_samples_per_class = 10000;
  std::uint64_t seed = 1;
  bool log_transform = false;

  /// Throws ConfigError on any inconsistent or non-finite setting.
  void validate() const;
};

nlohmann::json to_json(const PipelineConfig& config);
/// Overlays the keys present in `j` on `base`. Unknown keys are a ConfigError.
PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig base = {});

}  // namespace fracsar
