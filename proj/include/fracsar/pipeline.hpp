#pragma once

#include <span>
#include <vector>

#include "fracsar/config.hpp"
#include "fracsar/detection.hpp"
#include "fracsar/estimation.hpp"
#include "fracsar/lrt.hpp"
#include "fracsar/mlp.hpp"

namespace fracsar {

/// Both trained classifier stages plus the analysis settings they were trained with.
struct DetectionModel {
  PipelineConfig config;
  GaussianLrtModel lrt;
  MlpModel mlp;
};

struct SceneAnalysis {
  ExponentMap map;
  AdequacyMap adequacy;
  FeatureSet features;
};

FilterBank make_filter_bank(const GridSpec& spec, const PipelineConfig& config);

/// Optional log transform, exponent map, adequacy map and per-pixel features.
SceneAnalysis analyze_scene(const FieldGrid& image, const PipelineConfig& config);

struct LabeledScene {
  FieldGrid image;
  BinaryMask truth;
};

/// Pools valid-pixel features from every scene, caps each class at
/// config.max_samples_per_class by seeded subsampling, then fits the LRT and
/// trains the network.
DetectionModel train_detector(std::span<const LabeledScene> scenes, const PipelineConfig& config);

DetectionMask detect(const FieldGrid& image, const DetectionModel& model);
DetectionMask detect(const SceneAnalysis& analysis, const DetectionModel& model);

}  // namespace fracsar
