#include "fracsar/raster_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "fracsar/error.hpp"

namespace fracsar {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(RasterFormat f) {
  switch (f) {
    case RasterFormat::Png8: return "png8";
    case RasterFormat::Png16: return "png16";
    case RasterFormat::F32Raw: return "f32raw";
  }
  return "unknown";
}

RasterFormat parse_raster_format(std::string_view name) {
  if (name == "png8") return RasterFormat::Png8;
  if (name == "png16") return RasterFormat::Png16;
  if (name == "f32raw" || name == "f32") return RasterFormat::F32Raw;
  throw ConfigError("unknown raster format '" + std::string(name) + "'");
}

RasterFormat format_for_path(const fs::path& path) {
  return path.extension() == ".png" ? RasterFormat::Png16 : RasterFormat::F32Raw;
}

fs::path sidecar_path(const fs::path& path) {
  fs::path p = path;
  p += ".json";
  return p;
}

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("write failed for '" + path.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw DataError("cannot move output into place at '" + path.string() + "'");
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// PNG codec on memory buffers. libpng reports errors by longjmp, so the
// functions holding setjmp keep all state in caller-owned context objects.

namespace {

struct PngImage {
  int width = 0;
  int height = 0;
  int bit_depth = 8;
  int channels = 1;
  std::vector<std::uint8_t> samples;  // 16-bit samples big-endian, as in the file
};

struct PngContext {
  std::string buffer;
  std::size_t read_pos = 0;
  PngImage image;
  std::vector<png_bytep> rows;
  char message[256] = {};
};

void on_png_error(png_structp png, png_const_charp msg) {
  auto* ctx = static_cast<PngContext*>(png_get_error_ptr(png));
  std::snprintf(ctx->message, sizeof(ctx->message), "%s", msg);
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

void on_png_write(png_structp png, png_bytep data, png_size_t len) {
  auto* ctx = static_cast<PngContext*>(png_get_io_ptr(png));
  ctx->buffer.append(reinterpret_cast<const char*>(data), len);
}

void on_png_flush(png_structp) {}

void on_png_read(png_structp png, png_bytep data, png_size_t len) {
  auto* ctx = static_cast<PngContext*>(png_get_io_ptr(png));
  if (ctx->read_pos + len > ctx->buffer.size()) png_error(png, "truncated png data");
  std::memcpy(data, ctx->buffer.data() + ctx->read_pos, len);
  ctx->read_pos += len;
}

bool encode_png_impl(PngContext* ctx) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, ctx, on_png_error, on_png_warning);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  const PngImage& img = ctx->image;
  png_set_write_fn(png, ctx, on_png_write, on_png_flush);
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height),
               img.bit_depth, img.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  const std::size_t stride =
      static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.channels * img.bit_depth / 8);
  for (int r = 0; r < img.height; ++r) {
    png_write_row(png, const_cast<png_bytep>(img.samples.data() + static_cast<std::size_t>(r) * stride));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

bool decode_png_impl(PngContext* ctx) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, ctx, on_png_error, on_png_warning);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_set_read_fn(png, ctx, on_png_read);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color != PNG_COLOR_TYPE_GRAY && color != PNG_COLOR_TYPE_RGB) png_error(png, "unsupported png color type");
  if (depth != 8 && depth != 16) png_error(png, "unsupported png bit depth");
  png_set_interlace_handling(png);
  png_read_update_info(png, info);
  ctx->image.width = static_cast<int>(png_get_image_width(png, info));
  ctx->image.height = static_cast<int>(png_get_image_height(png, info));
  ctx->image.bit_depth = depth;
  ctx->image.channels = color == PNG_COLOR_TYPE_RGB ? 3 : 1;
  const std::size_t stride = png_get_rowbytes(png, info);
  ctx->image.samples.resize(stride * static_cast<std::size_t>(ctx->image.height));
  ctx->rows.resize(static_cast<std::size_t>(ctx->image.height));
  for (std::size_t r = 0; r < ctx->rows.size(); ++r) ctx->rows[r] = ctx->image.samples.data() + r * stride;
  png_read_image(png, ctx->rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

std::string encode_png(PngImage image) {
  PngContext ctx;
  ctx.image = std::move(image);
  if (!encode_png_impl(&ctx)) throw DataError(std::string("png encoding failed: ") + ctx.message);
  return std::move(ctx.buffer);
}

PngImage decode_png(const fs::path& path) {
  PngContext ctx;
  ctx.buffer = read_file(path);
  if (!decode_png_impl(&ctx)) {
    throw DataError("malformed png '" + path.string() + "': " + ctx.message);
  }
  return std::move(ctx.image);
}

std::uint16_t sample16(const PngImage& img, std::size_t i) {
  return static_cast<std::uint16_t>((img.samples[2 * i] << 8) | img.samples[2 * i + 1]);
}

void check_finite(const std::vector<double>& plane) {
  if (!std::all_of(plane.begin(), plane.end(), [](double v) { return std::isfinite(v); })) {
    throw DataError("non-finite raster data cannot be written without a mask plane");
  }
}

json value_range(const RasterStack& stack) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& p : stack.planes) {
    for (double v : p) {
      const auto f = static_cast<double>(static_cast<float>(v));
      if (!std::isfinite(f)) continue;
      lo = std::min(lo, f);
      hi = std::max(hi, f);
    }
  }
  if (!(lo <= hi)) return nullptr;
  return json::array({lo, hi});
}

}  // namespace

// ---------------------------------------------------------------------------

RasterStack load_raster_stack(const fs::path& path) {
  if (!fs::exists(path)) throw DataError("no such file '" + path.string() + "'");
  RasterStack stack;
  if (path.extension() == ".png") {
    const PngImage img = decode_png(path);
    if (img.channels != 1) throw DataError("unsupported color png for a field raster; expected greyscale");
    stack.width = img.width;
    stack.height = img.height;
    const std::size_t n = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
    std::vector<double> plane(n);
    for (std::size_t i = 0; i < n; ++i) {
      plane[i] = img.bit_depth == 16 ? sample16(img, i) / 65535.0 : img.samples[i] / 255.0;
    }
    stack.planes.push_back(std::move(plane));
    stack.plane_names.push_back("intensity");
    stack.metadata = {{"source_bit_depth", img.bit_depth}};
    return stack;
  }

  const auto side = sidecar_path(path);
  if (!fs::exists(side)) throw DataError("missing sidecar '" + side.string() + "'");
  json meta;
  try {
    meta = json::parse(read_file(side));
    if (meta.at("format").get<std::string>() != "f32raw") throw DataError("sidecar format is not f32raw");
    if (meta.value("endianness", "little") != "little") throw DataError("only little-endian f32raw is supported");
    stack.width = meta.at("width").get<int>();
    stack.height = meta.at("height").get<int>();
    stack.spacing = meta.value("spacing", 1.0);
    const auto planes = meta.at("plane_count").get<std::size_t>();
    stack.planes.resize(planes);
    stack.plane_names = meta.value("plane_names", std::vector<std::string>{});
    stack.metadata = meta.value("metadata", json::object());
  } catch (const json::exception& e) {
    throw DataError("malformed sidecar '" + side.string() + "': " + e.what());
  }
  if (stack.width <= 0 || stack.height <= 0 || stack.planes.empty()) {
    throw DataError("sidecar declares an empty raster");
  }
  const std::string payload = read_file(path);
  const std::size_t n = static_cast<std::size_t>(stack.width) * static_cast<std::size_t>(stack.height);
  if (payload.size() != 4 * n * stack.planes.size()) {
    throw DataError("payload size of '" + path.string() + "' does not match its sidecar");
  }
  const auto* bytes = reinterpret_cast<const unsigned char*>(payload.data());
  for (std::size_t p = 0; p < stack.planes.size(); ++p) {
    auto& plane = stack.planes[p];
    plane.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const unsigned char* b = bytes + 4 * (p * n + i);
      const std::uint32_t u = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
                              (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
      plane[i] = static_cast<double>(std::bit_cast<float>(u));
    }
  }
  if (stack.plane_names.size() != stack.planes.size()) stack.plane_names.assign(stack.planes.size(), "");
  return stack;
}

FieldGrid load_raster(const fs::path& path, bool log_transform_input) {
  auto stack = load_raster_stack(path);
  if (stack.plane_count() != 1) throw DataError("expected a single-plane raster in '" + path.string() + "'");
  GridSpec spec{stack.width, stack.height, stack.spacing};
  try {
    spec.validate();
  } catch (const ConfigError& e) {
    throw DataError(std::string("raster too small: ") + e.what());
  }
  FieldGrid field(spec, std::move(stack.planes.front()));
  return log_transform_input ? log_transform(field) : field;
}

void save_raster(const RasterStack& stack, const fs::path& path, RasterFormat format) {
  const std::size_t n = static_cast<std::size_t>(stack.width) * static_cast<std::size_t>(stack.height);
  for (const auto& p : stack.planes) {
    if (p.size() != n) throw DimensionError("raster plane does not match its dimensions");
  }
  if (stack.planes.empty()) throw DataError("raster has no planes");

  if (format == RasterFormat::F32Raw) {
    std::string payload(4 * n * stack.planes.size(), '\0');
    auto* out = reinterpret_cast<unsigned char*>(payload.data());
    for (std::size_t p = 0; p < stack.planes.size(); ++p) {
      for (std::size_t i = 0; i < n; ++i) {
        const auto u = std::bit_cast<std::uint32_t>(static_cast<float>(stack.planes[p][i]));
        unsigned char* b = out + 4 * (p * n + i);
        b[0] = static_cast<unsigned char>(u & 0xFF);
        b[1] = static_cast<unsigned char>((u >> 8) & 0xFF);
        b[2] = static_cast<unsigned char>((u >> 16) & 0xFF);
        b[3] = static_cast<unsigned char>((u >> 24) & 0xFF);
      }
    }
    std::vector<std::string> names = stack.plane_names;
    names.resize(stack.planes.size());
    const json side = {
        {"format", "f32raw"},
        {"endianness", "little"},
        {"width", stack.width},
        {"height", stack.height},
        {"plane_count", stack.planes.size()},
        {"spacing", stack.spacing},
        {"value_range", value_range(stack)},
        {"plane_names", names},
        {"metadata", stack.metadata},
    };
    write_file_atomic(path, payload);
    write_file_atomic(sidecar_path(path), side.dump(2) + "\n");
    return;
  }

  if (stack.planes.size() != 1) throw DataError("png rasters hold a single plane");
  check_finite(stack.planes.front());
  PngImage img;
  img.width = stack.width;
  img.height = stack.height;
  img.bit_depth = format == RasterFormat::Png16 ? 16 : 8;
  img.samples.resize(n * static_cast<std::size_t>(img.bit_depth / 8));
  for (std::size_t i = 0; i < n; ++i) {
    const double v = std::clamp(stack.planes.front()[i], 0.0, 1.0);
    if (img.bit_depth == 16) {
      const auto s = static_cast<std::uint16_t>(std::lround(v * 65535.0));
      img.samples[2 * i] = static_cast<std::uint8_t>(s >> 8);
      img.samples[2 * i + 1] = static_cast<std::uint8_t>(s & 0xFF);
    } else {
      img.samples[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
  }
  write_file_atomic(path, encode_png(std::move(img)));
}

RasterStack field_stack(const FieldGrid& field, std::string name) {
  RasterStack s;
  s.width = field.width();
  s.height = field.height();
  s.spacing = field.spec().spacing;
  s.planes.emplace_back(field.values().begin(), field.values().end());
  s.plane_names.push_back(std::move(name));
  return s;
}

void save_field(const FieldGrid& field, const fs::path& path, RasterFormat format,
                const json& parameters) {
  auto s = field_stack(field);
  s.metadata = {{"kind", "field"}, {"parameters", parameters}};
  save_raster(s, path, format);
}

void save_mask(const BinaryMask& mask, const fs::path& path) {
  PngImage img;
  img.width = mask.width();
  img.height = mask.height();
  img.samples.resize(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) img.samples[i] = mask[i] ? 255 : 0;
  write_file_atomic(path, encode_png(std::move(img)));
}

BinaryMask load_mask(const fs::path& path) {
  if (!fs::exists(path)) throw DataError("no such file '" + path.string() + "'");
  const PngImage img = decode_png(path);
  if (img.channels != 1) throw DataError("mask png must be greyscale");
  const std::size_t n = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
  std::vector<std::uint8_t> bits(n);
  for (std::size_t i = 0; i < n; ++i) {
    bits[i] = (img.bit_depth == 16 ? sample16(img, i) != 0 : img.samples[i] != 0) ? 1 : 0;
  }
  return BinaryMask(img.width, img.height, std::move(bits));
}

void save_rgb_png(const RgbMap& rgb, const fs::path& path) {
  PngImage img;
  img.width = rgb.spec.width;
  img.height = rgb.spec.height;
  img.channels = 3;
  const std::size_t n = rgb.spec.pixel_count();
  img.samples.resize(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t ch = 0; ch < 3; ++ch) img.samples[3 * i + ch] = rgb.channels[ch][i];
  }
  write_file_atomic(path, encode_png(std::move(img)));
}

std::vector<std::uint8_t> load_rgb_png(const fs::path& path, int& width, int& height) {
  if (!fs::exists(path)) throw DataError("no such file '" + path.string() + "'");
  PngImage img = decode_png(path);
  if (img.channels != 3 || img.bit_depth != 8) throw DataError("expected an 8-bit RGB png");
  width = img.width;
  height = img.height;
  return std::move(img.samples);
}

void save_exponent_map(const ExponentMap& map, const fs::path& path, const json& parameters) {
  RasterStack s;
  s.width = map.spec.width;
  s.height = map.spec.height;
  s.spacing = map.spec.spacing;
  for (std::size_t p = 0; p < map.plane_count(); ++p) {
    std::vector<double> plane(map.planes[p]);
    for (std::size_t i = 0; i < plane.size(); ++i) {
      if (!map.valid[i]) plane[i] = 0.0;
    }
    s.planes.push_back(std::move(plane));
    s.plane_names.push_back("exponent_s" + std::to_string(p));
  }
  std::vector<double> validity(map.spec.pixel_count());
  for (std::size_t i = 0; i < validity.size(); ++i) validity[i] = map.valid[i] ? 1.0 : 0.0;
  s.planes.push_back(std::move(validity));
  s.plane_names.push_back("valid");
  s.metadata = {{"kind", "exponent_map"},
                {"scales", map.scales},
                {"window_radius", map.window_radius},
                {"margin", map.margin},
                {"parameters", parameters}};
  save_raster(s, path, RasterFormat::F32Raw);
}

ExponentMap load_exponent_map(const fs::path& path) {
  auto s = load_raster_stack(path);
  if (s.metadata.value("kind", "") != "exponent_map") {
    throw DataError("'" + path.string() + "' is not an exponent map");
  }
  if (s.plane_count() < 2) throw DataError("exponent map needs at least one plane plus validity");
  ExponentMap map;
  map.spec = {s.width, s.height, s.spacing};
  try {
    map.scales = s.metadata.at("scales").get<std::vector<double>>();
    map.window_radius = s.metadata.at("window_radius").get<double>();
    map.margin = s.metadata.at("margin").get<int>();
  } catch (const json::exception& e) {
    throw DataError(std::string("exponent map sidecar incomplete: ") + e.what());
  }
  if (map.scales.size() + 1 != s.plane_count()) throw DataError("exponent map plane count does not match its scales");
  const auto& validity = s.planes.back();
  map.valid = BinaryMask(s.width, s.height);
  for (std::size_t i = 0; i < validity.size(); ++i) map.valid.set(i, validity[i] != 0.0);
  for (std::size_t p = 0; p + 1 < s.plane_count(); ++p) {
    auto plane = std::move(s.planes[p]);
    for (std::size_t i = 0; i < plane.size(); ++i) {
      if (!map.valid[i]) plane[i] = kInvalidExponent;
    }
    map.planes.push_back(std::move(plane));
    map.low_confidence.emplace_back(s.width, s.height);
  }
  return map;
}

void save_adequacy_map(const AdequacyMap& map, const fs::path& path, const json& parameters) {
  RasterStack s;
  s.width = map.spec.width;
  s.height = map.spec.height;
  s.spacing = map.spec.spacing;
  s.planes.push_back(map.dispersion);
  std::vector<double> validity(map.spec.pixel_count());
  for (std::size_t i = 0; i < validity.size(); ++i) validity[i] = map.valid[i] ? 1.0 : 0.0;
  s.planes.push_back(std::move(validity));
  s.plane_names = {"dispersion", "valid"};
  s.metadata = {{"kind", "adequacy_map"}, {"parameters", parameters}};
  save_raster(s, path, RasterFormat::F32Raw);
}

}  // namespace fracsar
