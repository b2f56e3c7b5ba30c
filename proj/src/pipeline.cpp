#include "fracsar/pipeline.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "fracsar/error.hpp"

namespace fracsar {

FilterBank make_filter_bank(const GridSpec& spec, const PipelineConfig& config) {
  return FilterBank(spec, config.scales, parse_kernel_family(config.kernel_family));
}

SceneAnalysis analyze_scene(const FieldGrid& image, const PipelineConfig& config) {
  config.validate();
  const FieldGrid input = config.log_transform ? log_transform(image) : image;
  const auto bank = make_filter_bank(input.spec(), config);
  LocalEstimateOptions opts;
  opts.window_radius = config.window_radius;
  SceneAnalysis a{local_exponent_map(input, bank, opts), {}, {}};
  a.adequacy = adequacy_statistic(a.map);
  a.features = extract_features(a.map, a.adequacy, config.include_adequacy);
  return a;
}

namespace {

FeatureSet cap_samples(const FeatureSet& set, std::size_t cap, std::mt19937_64& rng) {
  if (set.size() <= cap) return set;
  std::vector<std::size_t> order(set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(cap);
  std::sort(order.begin(), order.end());
  FeatureSet out;
  out.dim = set.dim;
  for (std::size_t r : order) out.push(set.row(r), set.pixels[r]);
  return out;
}

}  // namespace

DetectionModel train_detector(std::span<const LabeledScene> scenes, const PipelineConfig& config) {
  config.validate();
  if (scenes.empty()) throw DataError("no training scenes");
  FeatureSet sea;
  FeatureSet oil;
  for (const auto& scene : scenes) {
    if (scene.truth.width() != scene.image.width() || scene.truth.height() != scene.image.height()) {
      throw DimensionError("training mask does not match its image");
    }
    const auto analysis = analyze_scene(scene.image, config);
    sea.dim = oil.dim = analysis.features.dim;
    for (std::size_t i = 0; i < analysis.features.size(); ++i) {
      const std::size_t px = analysis.features.pixels[i];
      (scene.truth[px] ? oil : sea).push(analysis.features.row(i), px);
    }
  }
  if (sea.empty() || oil.empty()) throw DataError("training scenes must contain both classes");

  std::mt19937_64 rng(config.seed);
  sea = cap_samples(sea, config.max_samples_per_class, rng);
  oil = cap_samples(oil, config.max_samples_per_class, rng);

  DetectionModel model;
  model.config = config;
  model.lrt = fit_lrt(sea, oil, config.target_far, config.seed);

  FeatureSet pooled;
  pooled.dim = sea.dim;
  std::vector<std::uint8_t> labels;
  for (std::size_t i = 0; i < sea.size(); ++i) {
    pooled.push(sea.row(i));
    labels.push_back(0);
  }
  for (std::size_t i = 0; i < oil.size(); ++i) {
    pooled.push(oil.row(i));
    labels.push_back(1);
  }
  model.mlp = train_mlp(pooled, labels, config.mlp);
  return model;
}

DetectionMask detect(const SceneAnalysis& analysis, const DetectionModel& model) {
  const auto& spec = analysis.map.spec;
  const auto nn = mlp_score(analysis.features, model.mlp);
  const auto lrt = lrt_score(analysis.features, model.lrt);
  return classify(spec, scatter_scores(spec, analysis.features, nn),
                  scatter_scores(spec, analysis.features, lrt), model.config.nn_threshold,
                  model.lrt, model.config.combiner, model.config.min_region_area);
}

DetectionMask detect(const FieldGrid& image, const DetectionModel& model) {
  return detect(analyze_scene(image, model.config), model);
}

}  // namespace fracsar
