#pragma once

#include <filesystem>

#include <json.hpp>

#include "fracsar/pipeline.hpp"

namespace fracsar {

/// Single JSON document holding both classifier stages, the analysis
/// configuration and the training hyperparameters.
nlohmann::json model_to_json(const DetectionModel& model);
DetectionModel model_from_json(const nlohmann::json& j);

void save_model(const DetectionModel& model, const std::filesystem::path& path);
DetectionModel load_model(const std::filesystem::path& path);

}  // namespace fracsar
