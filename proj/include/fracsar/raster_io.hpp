#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fracsar/detection.hpp"
#include "fracsar/estimation.hpp"
#include "fracsar/grid.hpp"

namespace fracsar {

enum class RasterFormat { Png8, Png16, F32Raw };

std::string to_string(RasterFormat f);
RasterFormat parse_raster_format(std::string_view name);
/// ".png" -> Png16, anything else -> F32Raw.
RasterFormat format_for_path(const std::filesystem::path& path);

/// One or more equally sized float planes. f32raw files store them
/// little-endian, row-major, plane after plane, with a JSON sidecar at
/// "<path>.json".
struct RasterStack {
  int width = 0;
  int height = 0;
  double spacing = 1.0;
  std::vector<std::vector<double>> planes;
  std::vector<std::string> plane_names;
  /// Free-form sidecar section: kind, scales, creation parameters.
  nlohmann::json metadata = nlohmann::json::object();

  std::size_t plane_count() const noexcept { return planes.size(); }
};

std::filesystem::path sidecar_path(const std::filesystem::path& path);

/// Reads png (8/16-bit greyscale, mapped to [0,1]) or f32raw (verbatim,
/// checked against its sidecar). Throws DataError on malformed input.
RasterStack load_raster_stack(const std::filesystem::path& path);

/// Single-plane load as a field, optionally log-transformed.
FieldGrid load_raster(const std::filesystem::path& path, bool log_transform = false);

/// Writes atomically (temp file then rename). png formats clamp to [0,1] and
/// require a single finite plane; f32raw also writes the sidecar.
void save_raster(const RasterStack& stack, const std::filesystem::path& path, RasterFormat format);

RasterStack field_stack(const FieldGrid& field, std::string name = "field");
void save_field(const FieldGrid& field, const std::filesystem::path& path, RasterFormat format,
                const nlohmann::json& parameters = nlohmann::json::object());

/// Masks are 8-bit greyscale png, 0 or 255.
void save_mask(const BinaryMask& mask, const std::filesystem::path& path);
BinaryMask load_mask(const std::filesystem::path& path);

/// Standard 3-channel 8-bit png.
void save_rgb_png(const RgbMap& rgb, const std::filesystem::path& path);
/// Returns interleaved RGB bytes plus dimensions.
std::vector<std::uint8_t> load_rgb_png(const std::filesystem::path& path, int& width, int& height);

/// n exponent planes followed by a validity plane (1 valid, 0 invalid).
/// Invalid exponent samples are written as 0.
void save_exponent_map(const ExponentMap& map, const std::filesystem::path& path,
                       const nlohmann::json& parameters = nlohmann::json::object());
ExponentMap load_exponent_map(const std::filesystem::path& path);

/// One dispersion plane followed by a validity plane.
void save_adequacy_map(const AdequacyMap& map, const std::filesystem::path& path,
                       const nlohmann::json& parameters = nlohmann::json::object());

/// Writes bytes to path atomically.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

}  // namespace fracsar
