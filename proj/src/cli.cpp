#include "fracsar/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>

#include "fracsar/config.hpp"
#include "fracsar/error.hpp"
#include "fracsar/manifest.hpp"
#include "fracsar/model_io.hpp"
#include "fracsar/pipeline.hpp"
#include "fracsar/raster_io.hpp"
#include "fracsar/synthesis.hpp"

namespace fracsar {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Command-line mirror of PipelineConfig. Only options actually given on the
// command line override the configuration file.
struct PipelineFlags {
  std::string config_path;
  std::string kernel_family;
  std::vector<double> scales;
  double window_radius = 0;
  std::vector<double> rgb_range;
  std::vector<std::size_t> rgb_planes;
  bool include_adequacy = false;
  double adequacy_threshold = 0;
  int epochs = 0;
  double learning_rate = 0;
  int batch_size = 0;
  std::uint64_t mlp_seed = 0;
  double nn_threshold = 0;
  std::string combiner;
  double target_far = 0;
  int min_region_area = 0;
  std::size_t max_samples = 0;
  std::uint64_t seed = 0;
  bool log_transform = false;
  std::map<std::string, std::vector<CLI::Option*>> given;

  bool has(const std::string& key) const {
    const auto it = given.find(key);
    if (it == given.end()) return false;
    return std::any_of(it->second.begin(), it->second.end(), [](const CLI::Option* o) { return o->count() > 0; });
  }
};

void add_config_flag(CLI::App* sub, PipelineFlags& f) {
  sub->add_option("--config", f.config_path, "JSON configuration file; flags override it")
      ->check(CLI::ExistingFile);
}

void add_analysis_flags(CLI::App* sub, PipelineFlags& f) {
  f.given["kernel_family"].push_back(sub->add_option("--family", f.kernel_family, "Wavelet family (log)"));
  f.given["scales"].push_back(sub->add_option("--scales", f.scales, "Base scales, strictly increasing")->delimiter(','));
  f.given["window_radius"].push_back(sub->add_option("--window-radius", f.window_radius, "Local window radius in pixels"));
  f.given["log_transform"].push_back(sub->add_flag("--log-transform,!--no-log-transform", f.log_transform, "Log-transform intensities on load"));
  f.given["include_adequacy"].push_back(sub->add_flag("--include-adequacy,!--no-include-adequacy", f.include_adequacy,
                                              "Append cross-scale dispersion to the features"));
  f.given["adequacy_threshold"].push_back(sub->add_option("--adequacy-threshold", f.adequacy_threshold, "Dispersion level for the adequacy verdict"));
}

void add_rgb_flags(CLI::App* sub, PipelineFlags& f) {
  f.given["rgb_range"].push_back(sub->add_option("--rgb-range", f.rgb_range, "a_min,a_max")->delimiter(',')->expected(2));
  f.given["rgb_planes"].push_back(sub->add_option("--rgb-planes", f.rgb_planes, "Plane indices for R,G,B")->delimiter(',')->expected(3));
}

void add_decision_flags(CLI::App* sub, PipelineFlags& f) {
  f.given["nn_threshold"].push_back(sub->add_option("--nn-threshold", f.nn_threshold, "Network score threshold"));
  f.given["combiner"].push_back(sub->add_option("--combiner", f.combiner, "AND | OR | NN_ONLY | LRT_ONLY"));
  f.given["min_region_area"].push_back(sub->add_option("--min-region-area", f.min_region_area, "Smallest kept component"));
}

void add_training_flags(CLI::App* sub, PipelineFlags& f) {
  f.given["epochs"].push_back(sub->add_option("--epochs", f.epochs, "Network training epochs"));
  f.given["learning_rate"].push_back(sub->add_option("--learning-rate", f.learning_rate, "Gradient step"));
  f.given["batch_size"].push_back(sub->add_option("--batch-size", f.batch_size, "Mini-batch size"));
  f.given["mlp_seed"].push_back(sub->add_option("--mlp-seed", f.mlp_seed, "Network initialization/shuffle seed"));
  f.given["target_far"].push_back(sub->add_option("--target-far", f.target_far, "LRT false-alarm target"));
  f.given["max_samples_per_class"].push_back(sub->add_option("--max-samples", f.max_samples, "Per-class sample cap"));
  f.given["seed"].push_back(sub->add_option("--seed", f.seed, "Sampling and split seed"));
}

PipelineConfig overlay_flags(PipelineConfig c, const PipelineFlags& f) {
  if (f.has("kernel_family")) c.kernel_family = f.kernel_family;
  if (f.has("scales")) c.scales = f.scales;
  if (f.has("window_radius")) c.window_radius = f.window_radius;
  if (f.has("log_transform")) c.log_transform = f.log_transform;
  if (f.has("include_adequacy")) c.include_adequacy = f.include_adequacy;
  if (f.has("adequacy_threshold")) c.adequacy_threshold = f.adequacy_threshold;
  if (f.has("rgb_range")) c.rgb_range = {f.rgb_range.at(0), f.rgb_range.at(1)};
  if (f.has("rgb_planes")) c.rgb_planes = {f.rgb_planes.at(0), f.rgb_planes.at(1), f.rgb_planes.at(2)};
  if (f.has("nn_threshold")) c.nn_threshold = f.nn_threshold;
  if (f.has("combiner")) c.combiner = parse_combiner(f.combiner);
  if (f.has("min_region_area")) c.min_region_area = f.min_region_area;
  if (f.has("epochs")) c.mlp.epochs = f.epochs;
  if (f.has("learning_rate")) c.mlp.learning_rate = f.learning_rate;
  if (f.has("batch_size")) c.mlp.batch_size = f.batch_size;
  if (f.has("mlp_seed")) c.mlp.seed = f.mlp_seed;
  if (f.has("target_far")) c.target_far = f.target_far;
  if (f.has("max_samples_per_class")) c.max_samples_per_class = f.max_samples;
  if (f.has("seed")) c.seed = f.seed;
  c.validate();
  return c;
}

json read_json_file(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("configuration file is not valid JSON: " + std::string(e.what()));
  }
}

PipelineConfig resolve_config(const PipelineFlags& f, PipelineConfig base = {}) {
  if (!f.config_path.empty()) base = config_from_json(read_json_file(f.config_path), base);
  return overlay_flags(base, f);
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(precision) << v;
  return ss.str();
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string kind = "power-law";
  int size = 0;
  int width = 512;
  int height = 512;
  double spacing = 1.0;
  double exponent = 1.0;
  double amplitude = 1.0;
  double corr_length = 4.0;
  double anomaly_exponent = 1.8;
  double blend_width = 4.0;
  std::vector<double> ellipse;
  double brightness_offset = 0.0;
  int speckle_looks = 0;
  std::uint64_t seed = 1;
  std::string output;
  std::string mask_output;
  std::string format;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  GridSpec spec{a.size > 0 ? a.size : a.width, a.size > 0 ? a.size : a.height, a.spacing};
  spec.validate();
  const fs::path path = a.output;
  const RasterFormat format = a.format.empty() ? format_for_path(path) : parse_raster_format(a.format);

  json params = {{"kind", a.kind},          {"width", spec.width},         {"height", spec.height},
                 {"spacing", spec.spacing}, {"seed", a.seed},              {"speckle_looks", a.speckle_looks},
                 {"format", to_string(format)}};
  FieldGrid field;
  std::optional<BinaryMask> truth;
  if (a.kind == "power-law") {
    params["exponent"] = a.exponent;
    params["amplitude"] = a.amplitude;
    field = synthesize_power_law_field(spec, {a.amplitude, a.exponent}, a.seed);
  } else if (a.kind == "short-range") {
    params["corr_length"] = a.corr_length;
    field = synthesize_short_range_field(spec, a.corr_length, a.seed);
  } else if (a.kind == "scene") {
    std::vector<double> e = a.ellipse;
    if (e.empty()) e = {spec.width / 2.0, spec.height / 2.0, 0.25 * spec.width, 0.16 * spec.height};
    if (e.size() != 4 || !(e[2] > 0.0) || !(e[3] > 0.0)) throw ConfigError("--ellipse needs cx,cy,rx,ry with positive radii");
    params["exponent"] = a.exponent;
    params["amplitude"] = a.amplitude;
    params["anomaly_exponent"] = a.anomaly_exponent;
    params["blend_width"] = a.blend_width;
    params["ellipse"] = e;
    params["brightness_offset"] = a.brightness_offset;
    const auto base = synthesize_power_law_field(spec, {a.amplitude, a.exponent}, a.seed);
    const auto region = ellipse_mask(spec.width, spec.height, e[0], e[1], e[2], e[3]);
    auto composite = embed_anomaly(base, region, {a.amplitude, a.anomaly_exponent}, a.blend_width, a.seed + 1,
                                   a.brightness_offset);
    field = std::move(composite.field);
    truth = std::move(composite.truth);
  } else {
    throw ConfigError("unknown --kind '" + a.kind + "' (power-law, short-range, scene)");
  }
  if (a.speckle_looks > 0) field = apply_speckle(field, a.speckle_looks, a.seed + 2);

  if (format != RasterFormat::F32Raw) {
    const auto [lo, hi] = std::minmax_element(field.values().begin(), field.values().end());
    const double offset = *lo;
    const double range = *hi - *lo;
    if (!(range > 0.0)) throw DegenerateError("synthesized field is constant");
    std::vector<double> scaled(field.values().begin(), field.values().end());
    for (auto& v : scaled) v = (v - offset) / range;
    field = FieldGrid(field.spec(), std::move(scaled));
    params["png_offset"] = offset;
    params["png_range"] = range;
  }

  RunManifest manifest("synth");
  manifest.set_parameters(params);
  save_field(field, path, format, params);
  manifest.add_output("field", path);
  if (truth) {
    fs::path mpath = a.mask_output.empty() ? fs::path(a.output + ".truth.png") : fs::path(a.mask_output);
    save_mask(*truth, mpath);
    manifest.add_output("truth_mask", mpath);
    out << "truth mask: " << mpath.string() << " (" << truth->count() << " pixels)\n";
  }
  out << "wrote " << a.kind << " field " << spec.width << "x" << spec.height << " to " << path.string() << "\n";
  manifest.write_next_to(path);
  return kExitOk;
}

struct IoArgs {
  std::string input;
  std::string output;
  std::string secondary;
  std::string model;
  std::vector<std::string> images;
  std::vector<std::string> masks;
  int scale_index = -1;
  int max_lag = 128;
  std::vector<double> radii{64.0, 128.0};
  std::string pred;
  std::string truth;
};

int cmd_filter(const IoArgs& a, const PipelineConfig& cfg, std::ostream& out) {
  const auto field = load_raster(a.input, cfg.log_transform);
  const auto bank = make_filter_bank(field.spec(), cfg);
  std::vector<std::size_t> indices;
  if (a.scale_index >= 0) {
    bank.pair(static_cast<std::size_t>(a.scale_index));
    indices.push_back(static_cast<std::size_t>(a.scale_index));
  } else {
    for (std::size_t i = 0; i < bank.size(); ++i) indices.push_back(i);
  }
  RasterStack stack;
  stack.width = field.width();
  stack.height = field.height();
  stack.spacing = field.spec().spacing;
  json results = json::array();
  for (auto i : indices) {
    const auto pair = filter_pair(field, bank, i);
    const auto vp = global_variance_pair(pair);
    const double a_hat = exponent_from_variances(vp);
    out << "scale " << pair.scale << ": v1=" << vp.v1 << " v2=" << vp.v2 << " ratio=" << fmt(vp.v2 / vp.v1)
        << " exponent=" << fmt(a_hat) << "\n";
    results.push_back({{"scale", pair.scale}, {"v1", vp.v1}, {"v2", vp.v2}, {"exponent", a_hat}});
    stack.planes.emplace_back(pair.y1.values().begin(), pair.y1.values().end());
    stack.planes.emplace_back(pair.y2.values().begin(), pair.y2.values().end());
    stack.plane_names.push_back("y1_s" + std::to_string(i));
    stack.plane_names.push_back("y2_s" + std::to_string(i));
  }
  json params = {{"config", to_json(cfg)}, {"scale_index", a.scale_index}};
  stack.metadata = {{"kind", "filtered_pairs"}, {"parameters", params}};
  if (!a.output.empty()) {
    RunManifest manifest("filter");
    manifest.set_parameters(params);
    manifest.add_input("image", a.input);
    save_raster(stack, a.output, RasterFormat::F32Raw);
    manifest.add_output("filtered", a.output);
    manifest.set_result("scales", results);
    manifest.write_next_to(a.output);
  }
  return kExitOk;
}

int cmd_estimate(const IoArgs& a, const PipelineConfig& cfg, std::ostream& out) {
  const auto field = load_raster(a.input, cfg.log_transform);
  const auto bank = make_filter_bank(field.spec(), cfg);
  const auto global = global_exponents(field, bank);
  SceneAnalysis analysis = analyze_scene(field, [&] {
    PipelineConfig c = cfg;
    c.log_transform = false;  // already applied on load
    return c;
  }());
  const double dispersion = analysis.adequacy.mean_dispersion();

  json per_scale = json::array();
  double sum = 0.0;
  for (std::size_t i = 0; i < global.size(); ++i) {
    const auto h = exponent_to_hurst(global[i]);
    const double local = analysis.map.valid_mean(i);
    sum += global[i];
    out << "scale " << bank.scales()[i] << ": global_exponent=" << fmt(global[i]) << " local_mean=" << fmt(local)
        << " hurst=" << fmt(h.hurst) << (h.in_range ? "" : " (outside (0,1))") << "\n";
    per_scale.push_back({{"scale", bank.scales()[i]},
                         {"global_exponent", global[i]},
                         {"local_mean", std::isfinite(local) ? json(local) : json(nullptr)},
                         {"hurst", h.hurst},
                         {"hurst_in_range", h.in_range}});
  }
  const double mean_global = sum / static_cast<double>(global.size());
  const bool adequate = std::isfinite(dispersion) && dispersion < cfg.adequacy_threshold;
  out << "global_exponent=" << fmt(mean_global) << "\n";
  out << "valid_pixels=" << analysis.map.valid_count() << " mean_dispersion="
      << (std::isfinite(dispersion) ? fmt(dispersion) : std::string("nan")) << " power_law_adequate="
      << (adequate ? "true" : "false") << "\n";

  if (!a.output.empty()) {
    const json params = {{"config", to_json(cfg)}};
    RunManifest manifest("estimate");
    manifest.set_parameters(params);
    manifest.add_input("image", a.input);
    save_exponent_map(analysis.map, a.output, params);
    manifest.add_output("exponent_map", a.output);
    if (!a.secondary.empty()) {
      save_adequacy_map(analysis.adequacy, a.secondary, params);
      manifest.add_output("adequacy_map", a.secondary);
    }
    manifest.set_result("scales", per_scale);
    manifest.set_result("global_exponent", mean_global);
    manifest.set_result("mean_dispersion", std::isfinite(dispersion) ? json(dispersion) : json(nullptr));
    manifest.set_result("power_law_adequate", adequate);
    manifest.write_next_to(a.output);
  }
  return kExitOk;
}

int cmd_rgbmap(const IoArgs& a, const PipelineConfig& cfg, std::ostream& out) {
  ExponentMap map;
  const fs::path in = a.input;
  bool from_map = false;
  if (in.extension() != ".png" && fs::exists(sidecar_path(in))) {
    const auto side = read_json_file(sidecar_path(in));
    from_map = side.contains("metadata") && side["metadata"].value("kind", "") == "exponent_map";
  }
  if (from_map) {
    map = load_exponent_map(in);
  } else {
    PipelineConfig c = cfg;
    map = analyze_scene(load_raster(in), c).map;
  }
  const auto rgb = rgb_from_exponents(map, cfg.rgb_planes, cfg.rgb_range);
  const json params = {{"config", to_json(cfg)}, {"input_is_exponent_map", from_map}};
  RunManifest manifest("rgbmap");
  manifest.set_parameters(params);
  manifest.add_input(from_map ? "exponent_map" : "image", in);
  save_rgb_png(rgb, a.output);
  manifest.add_output("rgb", a.output);
  manifest.write_next_to(a.output);
  out << "wrote RGB map " << rgb.spec.width << "x" << rgb.spec.height << " to " << a.output << "\n";
  return kExitOk;
}

int cmd_train(const IoArgs& a, const PipelineConfig& cfg, std::ostream& out) {
  if (a.images.size() != a.masks.size() || a.images.empty()) {
    throw ConfigError("give one --mask per --image");
  }
  std::vector<LabeledScene> scenes;
  for (std::size_t i = 0; i < a.images.size(); ++i) {
    scenes.push_back({load_raster(a.images[i]), load_mask(a.masks[i])});
  }
  const auto model = train_detector(scenes, cfg);
  if (model.mlp.class_imbalance) {
    throw DataError("training labels are too imbalanced (each class needs at least 5% of samples)");
  }
  const json params = {{"config", to_json(cfg)}};
  RunManifest manifest("train");
  manifest.set_parameters(params);
  for (std::size_t i = 0; i < a.images.size(); ++i) {
    manifest.add_input("image" + std::to_string(i), a.images[i]);
    manifest.add_input("mask" + std::to_string(i), a.masks[i]);
  }
  save_model(model, a.output);
  manifest.add_output("model", a.output);
  manifest.set_result("lrt_threshold", model.lrt.threshold);
  manifest.set_result("lrt_heldout_far", model.lrt.heldout_far);
  manifest.set_result("lrt_detection_rate", model.lrt.detection_rate);
  manifest.set_result("lrt_separable", model.lrt.separable);
  manifest.set_result("mlp_final_loss", model.mlp.final_loss);
  manifest.write_next_to(a.output);
  out << "lrt threshold=" << fmt(model.lrt.threshold) << " heldout_far=" << fmt(model.lrt.heldout_far)
      << " detection_rate=" << fmt(model.lrt.detection_rate) << " separable=" << (model.lrt.separable ? "true" : "false")
      << "\n";
  out << "mlp final_loss=" << fmt(model.mlp.final_loss, 6) << "\n";
  return kExitOk;
}

int cmd_detect(const IoArgs& a, const PipelineFlags& flags, std::ostream& out) {
  DetectionModel model = load_model(a.model);
  const PipelineConfig cfg = resolve_config(flags, model.config);
  const json analysis_keys = {"kernel_family", "scales", "window_radius", "include_adequacy", "log_transform"};
  const json trained = to_json(model.config);
  const json effective = to_json(cfg);
  for (const auto& key : analysis_keys) {
    const auto k = key.get<std::string>();
    if (trained[k] != effective[k]) throw ConfigError("'" + k + "' differs from the value the model was trained with");
  }
  model.config = cfg;

  const auto mask = detect(load_raster(a.input), model);
  const json params = {{"config", effective}};
  RunManifest manifest("detect");
  manifest.set_parameters(params);
  manifest.add_input("image", a.input);
  manifest.add_input("model", a.model);
  save_mask(mask.mask, a.output);
  manifest.add_output("mask", a.output);
  if (!a.secondary.empty()) {
    RasterStack scores;
    scores.width = mask.spec.width;
    scores.height = mask.spec.height;
    scores.spacing = mask.spec.spacing;
    scores.planes = {mask.scores_nn, mask.scores_lrt};
    scores.plane_names = {"nn_score", "lrt_score"};
    scores.metadata = {{"kind", "detection_scores"}, {"parameters", params}};
    save_raster(scores, a.secondary, RasterFormat::F32Raw);
    manifest.add_output("scores", a.secondary);
  }
  manifest.set_result("positive_pixels", mask.mask.count());
  manifest.write_next_to(a.output);
  out << "positive_pixels=" << mask.mask.count() << " combiner=" << to_string(cfg.combiner) << "\n";
  return kExitOk;
}

int cmd_eval(const IoArgs& a, std::ostream& out) {
  const auto m = evaluate_mask(load_mask(a.pred), load_mask(a.truth));
  out << "iou=" << fmt(m.iou) << " precision=" << fmt(m.precision) << " recall=" << fmt(m.recall)
      << " false_alarm_rate=" << fmt(m.false_alarm_rate, 6) << "\n";
  if (!a.output.empty()) {
    const json report = {{"iou", m.iou},
                         {"precision", m.precision},
                         {"recall", m.recall},
                         {"false_alarm_rate", m.false_alarm_rate},
                         {"true_positive", m.true_positive},
                         {"false_positive", m.false_positive},
                         {"false_negative", m.false_negative},
                         {"true_negative", m.true_negative}};
    RunManifest manifest("eval");
    manifest.add_input("prediction", a.pred);
    manifest.add_input("truth", a.truth);
    write_file_atomic(a.output, report.dump(2) + "\n");
    manifest.add_output("metrics", a.output);
    manifest.write_next_to(a.output);
  }
  return kExitOk;
}

int cmd_lrd(const IoArgs& a, bool log_input, std::ostream& out) {
  const auto field = load_raster(a.input, log_input);
  const auto profile = radial_correlation(field, a.max_lag);
  const auto sums = lrd_divergence_statistic(profile, a.radii);
  out << "R(0)=" << profile.values.front() << "\n";
  for (std::size_t i = 0; i < sums.size(); ++i) out << "S(" << a.radii[i] << ")=" << sums[i] << "\n";
  double ratio = std::numeric_limits<double>::quiet_NaN();
  if (sums.size() >= 2 && sums.front() > 0.0) {
    ratio = sums.back() / sums.front();
    out << "ratio S(" << a.radii.back() << ")/S(" << a.radii.front() << ")=" << fmt(ratio) << "\n";
  }
  if (!a.output.empty()) {
    const json params = {{"max_lag", a.max_lag}, {"radii", a.radii}, {"log_transform", log_input}};
    const json report = {{"parameters", params},
                         {"lags", profile.lags},
                         {"correlation", profile.values},
                         {"count_per_lag", profile.count_per_lag},
                         {"partial_integrals", sums},
                         {"ratio", std::isfinite(ratio) ? json(ratio) : json(nullptr)}};
    RunManifest manifest("lrd-check");
    manifest.set_parameters(params);
    manifest.add_input("field", a.input);
    write_file_atomic(a.output, report.dump(2) + "\n");
    manifest.add_output("report", a.output);
    manifest.write_next_to(a.output);
  }
  return kExitOk;
}

std::string one_line(std::string s) {
  for (auto& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Power-law texture analysis and slick detection for intensity images", "fracsar"};
  app.require_subcommand(1, 1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate power-law, short-range or composite scene fields");
  s->add_option("--kind", synth.kind, "power-law | short-range | scene")->capture_default_str();
  s->add_option("--size", synth.size, "Square grid size (overrides --width/--height)");
  s->add_option("--width", synth.width)->capture_default_str();
  s->add_option("--height", synth.height)->capture_default_str();
  s->add_option("--spacing", synth.spacing)->capture_default_str();
  s->add_option("--exponent", synth.exponent, "Spectral exponent (scene: background)")->capture_default_str();
  s->add_option("--amplitude", synth.amplitude)->capture_default_str();
  s->add_option("--corr-length", synth.corr_length)->capture_default_str();
  s->add_option("--anomaly-exponent", synth.anomaly_exponent)->capture_default_str();
  s->add_option("--blend-width", synth.blend_width)->capture_default_str();
  s->add_option("--ellipse", synth.ellipse, "cx,cy,rx,ry in pixels")->delimiter(',')->expected(4);
  s->add_option("--brightness-offset", synth.brightness_offset)->capture_default_str();
  s->add_option("--speckle-looks", synth.speckle_looks, "0 disables speckle")->capture_default_str();
  s->add_option("--seed", synth.seed)->capture_default_str();
  s->add_option("-o,--output", synth.output)->required();
  s->add_option("--mask-out", synth.mask_output, "Truth mask path for scenes");
  s->add_option("--format", synth.format, "png8 | png16 | f32raw (default from extension)");

  IoArgs io;
  PipelineFlags flags;
  auto* f = app.add_subcommand("filter", "Apply the dyadic filter bank");
  f->add_option("-i,--input", io.input)->required();
  f->add_option("-o,--output", io.output, "f32raw stack of y1/y2 planes");
  f->add_option("--scale-index", io.scale_index, "Only this bank entry");
  add_config_flag(f, flags);
  add_analysis_flags(f, flags);

  auto* e = app.add_subcommand("estimate", "Global and local exponent estimates");
  e->add_option("-i,--input", io.input)->required();
  e->add_option("-o,--output", io.output, "Exponent map (f32raw)");
  e->add_option("--adequacy-out", io.secondary, "Adequacy map (f32raw)");
  add_config_flag(e, flags);
  add_analysis_flags(e, flags);

  auto* r = app.add_subcommand("rgbmap", "Render three exponent planes as RGB");
  r->add_option("-i,--input", io.input, "Exponent map or image")->required();
  r->add_option("-o,--output", io.output)->required();
  add_config_flag(r, flags);
  add_analysis_flags(r, flags);
  add_rgb_flags(r, flags);

  auto* t = app.add_subcommand("train", "Fit both classifier stages from image/mask pairs");
  t->add_option("--image", io.images)->required();
  t->add_option("--mask", io.masks)->required();
  t->add_option("-o,--output", io.output, "Model JSON")->required();
  add_config_flag(t, flags);
  add_analysis_flags(t, flags);
  add_training_flags(t, flags);
  add_decision_flags(t, flags);

  auto* d = app.add_subcommand("detect", "Detection mask from an image and a trained model");
  d->add_option("-i,--input", io.input)->required();
  d->add_option("-m,--model", io.model)->required();
  d->add_option("-o,--output", io.output, "Mask png")->required();
  d->add_option("--scores-out", io.secondary, "Score planes (f32raw)");
  add_config_flag(d, flags);
  add_decision_flags(d, flags);

  auto* v = app.add_subcommand("eval", "Compare a mask with ground truth");
  v->add_option("--pred", io.pred)->required();
  v->add_option("--truth", io.truth)->required();
  v->add_option("-o,--output", io.output, "Metrics JSON");

  bool lrd_log = false;
  auto* l = app.add_subcommand("lrd-check", "Correlation profile and divergence statistic");
  l->add_option("-i,--input", io.input)->required();
  l->add_option("--max-lag", io.max_lag)->capture_default_str();
  l->add_option("--radii", io.radii)->delimiter(',')->capture_default_str();
  l->add_option("-o,--output", io.output, "Report JSON");
  l->add_flag("--log-transform", lrd_log);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& ex) {
    err << "error: " << one_line(ex.what()) << "\n";
    return kExitConfig;
  }

  try {
    if (s->parsed()) return cmd_synth(synth, out);
    if (f->parsed()) return cmd_filter(io, resolve_config(flags), out);
    if (e->parsed()) return cmd_estimate(io, resolve_config(flags), out);
    if (r->parsed()) return cmd_rgbmap(io, resolve_config(flags), out);
    if (t->parsed()) return cmd_train(io, resolve_config(flags), out);
    if (d->parsed()) return cmd_detect(io, flags, out);
    if (v->parsed()) return cmd_eval(io, out);
    if (l->parsed()) return cmd_lrd(io, lrd_log, out);
  } catch (const ConfigError& ex) {
    err << "config error: " << one_line(ex.what()) << "\n";
    return kExitConfig;
  } catch (const DataError& ex) {
    err << "data error: " << one_line(ex.what()) << "\n";
    return kExitData;
  } catch (const NumericError& ex) {
    err << "numeric error: " << one_line(ex.what()) << "\n";
    return kExitNumeric;
  } catch (const std::exception& ex) {
    err << "data error: " << one_line(ex.what()) << "\n";
    return kExitData;
  }
  return kExitConfig;
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("fracsar");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_command(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace fracsar
