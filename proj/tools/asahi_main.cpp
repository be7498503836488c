// Command-line front end for the adaptive slicing toolkit: slice planning,
// redundancy accounting, synthetic scenes, the dual-pathway detection
// pipeline, COCO-style evaluation, fine-tuning dataset construction and the
// strategy benchmark.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "asahi/coco.hpp"
#include "asahi/detection.hpp"
#include "asahi/detector.hpp"
#include "asahi/eval.hpp"
#include "asahi/fusion.hpp"
#include "asahi/nms.hpp"
#include "asahi/raster.hpp"
#include "asahi/redundancy.hpp"
#include "asahi/saf.hpp"
#include "asahi/scenegen.hpp"
#include "asahi/slicing.hpp"

namespace fs = std::filesystem;
using namespace asahi;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct GlobalOptions {
  double mu = 0.15;
  int limiting_dimension = 512;
  int resize_target = 512;
  std::string metric = "diou";
  double suppression_threshold = 0.5;
  bool class_agnostic = false;
  int parallelism = 0;
  std::uint64_t seed = 1;
  std::string format = "text";

  AsahiConfig asahi() const {
    AsahiConfig cfg;
    cfg.overlap_ratio = mu;
    cfg.limiting_dimension = limiting_dimension;
    cfg.resize_target = resize_target;
    return cfg;
  }

  SuppressionConfig suppression() const {
    SuppressionConfig cfg;
    if (metric == "iou") {
      cfg.metric = OverlapMetric::Iou;
    } else if (metric == "giou") {
      cfg.metric = OverlapMetric::Giou;
    } else if (metric == "diou") {
      cfg.metric = OverlapMetric::Diou;
    } else if (metric == "ciou") {
      cfg.metric = OverlapMetric::Ciou;
    } else {
      throw CLI::ValidationError("--metric", "unknown metric: " + metric);
    }
    cfg.threshold = suppression_threshold;
    cfg.class_aware = !class_agnostic;
    return cfg;
  }

  bool csv() const { return format == "csv"; }
};

ImageDims parse_dims(const std::string& text) {
  const std::size_t cross = text.find('x');
  if (cross == std::string::npos) {
    throw CLI::ValidationError("--dims", "expected WIDTHxHEIGHT, got: " + text);
  }
  try {
    const int w = std::stoi(text.substr(0, cross));
    const int h = std::stoi(text.substr(cross + 1));
    return ImageDims(w, h);
  } catch (const std::exception&) {
    throw CLI::ValidationError("--dims", "expected WIDTHxHEIGHT, got: " + text);
  }
}

std::vector<ImageDims> parse_resolution_list(const std::string& text) {
  std::vector<ImageDims> dims;
  std::stringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ',')) {
    if (!token.empty()) dims.push_back(parse_dims(token));
  }
  return dims;
}

const std::vector<ImageDims>& default_resolutions() {
  static const std::vector<ImageDims> kDims = {ImageDims(960, 540),   ImageDims(1360, 765),
                                               ImageDims(1400, 1050), ImageDims(1920, 1080),
                                               ImageDims(2000, 1500), ImageDims(2913, 2428)};
  return kDims;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::unique_ptr<DetectorAdapter> make_detector(const Scene& scene, const Raster* raster,
                                               const OracleParams& oracle_params,
                                               const std::string& command, double timeout,
                                               const std::string& scratch_dir) {
  if (command.empty()) {
    return std::make_unique<OracleDetector>(scene, oracle_params);
  }
  if (raster == nullptr) {
    throw std::runtime_error("external detector requires --images with rasters for scene " +
                             std::to_string(scene.image_id));
  }
  return std::make_unique<ExternalDetector>(*raster, command, scratch_dir, timeout);
}

SlicePlan plan_for_strategy(const std::string& strategy, ImageDims dims, const AsahiConfig& cfg,
                            int sahi_patch) {
  if (strategy == "adaptive") return asahi_plan(dims, cfg);
  if (strategy == "sahi-512") return fixed_plan(dims, sahi_patch, cfg.overlap_ratio);
  if (strategy == "grid-4") return grid_plan(dims, 2, 2, cfg.overlap_ratio);
  if (strategy == "grid-6") return grid_plan(dims, 3, 2, cfg.overlap_ratio);
  if (strategy == "grid-12") return grid_plan(dims, 4, 3, cfg.overlap_ratio);
  if (strategy == "grid-15") return grid_plan(dims, 5, 3, cfg.overlap_ratio);
  throw std::runtime_error("unknown strategy: " + strategy);
}

// ---------------------------------------------------------------------------
// plan
// ---------------------------------------------------------------------------

struct PlanArgs {
  std::string dims_text;
  std::string image_path;
  std::string strategy = "asahi";
  int patch = 512;
  std::string out_path;
};

int cmd_plan(const GlobalOptions& global, const PlanArgs& args) {
  ImageDims dims(1, 1);
  if (!args.dims_text.empty()) {
    dims = parse_dims(args.dims_text);
  } else if (!args.image_path.empty()) {
    const Raster image = read_ppm(args.image_path);
    dims = ImageDims(image.width, image.height);
  } else {
    throw CLI::ValidationError("plan", "either --dims or --image is required");
  }

  const SlicePlan plan = args.strategy == "fixed"
                             ? fixed_plan(dims, args.patch, global.mu)
                             : asahi_plan(dims, global.asahi());
  std::ostringstream out;
  if (global.csv()) {
    out << "row,col,x1,y1,x2,y2\n";
    for (const SliceWindow& w : plan.windows) {
      out << w.row << ',' << w.col << ',' << w.x1 << ',' << w.y1 << ',' << w.x2 << ',' << w.y2
          << '\n';
    }
  } else {
    out << "strategy " << (plan.strategy == SliceStrategy::Asahi ? "asahi" : "fixed") << '\n'
        << "source " << dims.width << 'x' << dims.height << '\n'
        << "grid " << plan.rows << 'x' << plan.cols << " (" << plan.window_count()
        << " windows)\n"
        << "window " << plan.window_width << 'x' << plan.window_height << '\n'
        << "processed_pixels " << plan.processed_pixels() << '\n'
        << format_plan_windows(plan);
  }
  if (!args.out_path.empty()) {
    write_text(args.out_path, out.str());
  } else {
    std::cout << out.str();
  }
  return 0;
}

// ---------------------------------------------------------------------------
// slice
// ---------------------------------------------------------------------------

struct SliceArgs {
  std::string image_path;
  std::string out_dir = "slices";
  std::string strategy = "asahi";
  int patch = 512;
};

int cmd_slice(const GlobalOptions& global, const SliceArgs& args) {
  const Raster image = read_ppm(args.image_path);
  const ImageDims dims(image.width, image.height);
  const SlicePlan plan = args.strategy == "fixed" ? fixed_plan(dims, args.patch, global.mu)
                                                  : asahi_plan(dims, global.asahi());
  fs::create_directories(args.out_dir);
  std::ostringstream index;
  for (const SliceWindow& window : plan.windows) {
    const PatchResult patch = extract_patch(image, window, global.resize_target);
    const std::string name =
        "patch_r" + std::to_string(window.row) + "c" + std::to_string(window.col) + ".ppm";
    write_ppm(patch.patch, (fs::path(args.out_dir) / name).string());
    char line[160];
    std::snprintf(line, sizeof(line), "%d %d %d %d %d %d %s %.6f %.6f\n", window.row, window.col,
                  window.x1, window.y1, window.x2, window.y2, name.c_str(), patch.scale_x,
                  patch.scale_y);
    index << line;
  }
  write_text((fs::path(args.out_dir) / "windows.txt").string(), index.str());
  std::cout << "wrote " << plan.window_count() << " patches to " << args.out_dir << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// redundancy
// ---------------------------------------------------------------------------

struct RedundancyArgs {
  std::string resolutions_text;
  int patch = 512;
  std::string out_path;
};

int cmd_redundancy(const GlobalOptions& global, const RedundancyArgs& args) {
  const std::vector<ImageDims> resolutions = args.resolutions_text.empty()
                                                 ? default_resolutions()
                                                 : parse_resolution_list(args.resolutions_text);
  const std::vector<ReductionRow> rows = reduction_table(resolutions, global.asahi(), args.patch);
  std::cout << format_reduction_table(rows, global.csv());
  if (!args.out_path.empty()) {
    write_text(args.out_path, format_reduction_table(rows, true));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// scenegen
// ---------------------------------------------------------------------------

struct ScenegenArgs {
  std::string out_path = "scenes.json";
  int scene_count = 1;
  std::string dims_text = "1920x1080";
  int objects = 100;
  int classes = 3;
  double small_fraction = 0.7;
  double crowding = 0.3;
  double small_edge_min = 8.0, small_edge_max = 28.0;
  double big_edge_min = 36.0, big_edge_max = 180.0;
  std::string render_dir;
};

int cmd_scenegen(const GlobalOptions& global, const ScenegenArgs& args) {
  std::vector<Scene> scenes;
  for (int i = 0; i < args.scene_count; ++i) {
    SceneSpec spec;
    spec.seed = global.seed + static_cast<std::uint64_t>(i);
    spec.dims = parse_dims(args.dims_text);
    spec.object_count = args.objects;
    spec.class_count = args.classes;
    spec.small_fraction = args.small_fraction;
    spec.crowding_max_iou = args.crowding;
    spec.small_edge_min = args.small_edge_min;
    spec.small_edge_max = args.small_edge_max;
    spec.big_edge_min = args.big_edge_min;
    spec.big_edge_max = args.big_edge_max;
    Scene scene = generate_scene(spec);
    scene.image_id = i + 1;
    scene.file_name = "scene_" + std::to_string(scene.image_id) + ".ppm";
    scenes.push_back(std::move(scene));
  }
  if (!args.render_dir.empty()) {
    fs::create_directories(args.render_dir);
    for (const Scene& scene : scenes) {
      render_ppm(scene, (fs::path(args.render_dir) / scene.file_name).string());
    }
  }
  write_coco_scenes(scenes, args.out_path);
  std::size_t objects = 0;
  for (const Scene& scene : scenes) objects += scene.objects.size();
  std::cout << "wrote " << scenes.size() << " scenes (" << objects << " objects) to "
            << args.out_path << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// detect
// ---------------------------------------------------------------------------

struct DetectArgs {
  std::string gt_path;
  std::string images_dir;
  std::string out_path = "detections.txt";
  std::string summary_path;
  std::string detector_command;  // empty selects the oracle
  double timeout = 30.0;
  double min_detectable = 4.0;
  double jitter = 0.0;
  double miss_rate = 0.0;
  double fp_rate = 0.0;
  bool no_full_inference = false;
  bool no_patch_overlap = false;
  bool fail_fast = false;
};

int cmd_detect(const GlobalOptions& global, const DetectArgs& args) {
  const std::vector<Scene> scenes = read_coco_scenes(args.gt_path);
  PipelineConfig cfg;
  cfg.asahi = global.asahi();
  cfg.suppression = global.suppression();
  cfg.enable_full_inference = !args.no_full_inference;
  cfg.enable_patch_overlap = !args.no_patch_overlap;
  cfg.parallelism = global.parallelism;

  OracleParams oracle_params;
  oracle_params.min_detectable_px = args.min_detectable;
  oracle_params.jitter_sigma = args.jitter;
  oracle_params.miss_rate = args.miss_rate;
  oracle_params.fp_rate = args.fp_rate;
  oracle_params.seed = global.seed;

  const std::string scratch =
      (fs::temp_directory_path() / ("asahi_detect_" + std::to_string(::getpid()))).string();
  if (!args.detector_command.empty()) fs::create_directories(scratch);

  std::ostringstream detections_out;
  std::ostringstream summary;
  std::vector<std::string> failures;
  double wall_total = 0;
  double pixels_total = 0;
  std::size_t detections_total = 0;

  for (const Scene& scene : scenes) {
    try {
      std::optional<Raster> raster;
      if (!args.images_dir.empty() && !scene.file_name.empty()) {
        const fs::path path = fs::path(args.images_dir) / scene.file_name;
        if (fs::exists(path)) raster = read_ppm(path.string());
      }
      const auto detector =
          make_detector(scene, raster ? &*raster : nullptr, oracle_params, args.detector_command,
                        args.timeout, scratch);
      const PipelineResult result =
          run_pipeline({scene.image_id, scene.dims}, *detector, cfg);
      write_interchange(detections_out, scene.image_id, result.detections);
      wall_total += result.timings.total_s();
      pixels_total += result.processed_pixels;
      detections_total += result.final_detections;
      char line[256];
      std::snprintf(line, sizeof(line),
                    "image %ld: grid %dx%d raw_slice %zu raw_full %zu merged %zu final %zu "
                    "dropped %zu calls %zu wall %.4fs\n",
                    scene.image_id, result.grid_rows, result.grid_cols,
                    result.raw_slice_detections, result.raw_full_detections,
                    result.merged_detections, result.final_detections, result.dropped_after_remap,
                    result.detector_calls, result.timings.total_s());
      summary << line;
    } catch (const std::exception& e) {
      if (args.fail_fast) throw;
      failures.push_back("image " + std::to_string(scene.image_id) + ": " + e.what());
    }
  }
  if (!args.detector_command.empty()) fs::remove_all(scratch);

  write_text(args.out_path, detections_out.str());
  char totals[256];
  std::snprintf(totals, sizeof(totals),
                "images %zu detections %zu failures %zu wall %.4fs img/s %.3f pixels %.0f\n",
                scenes.size() - failures.size(), detections_total, failures.size(), wall_total,
                wall_total > 0 ? (scenes.size() - failures.size()) / wall_total : 0.0,
                pixels_total);
  summary << totals;
  for (const std::string& failure : failures) summary << "FAILED " << failure << '\n';
  if (!args.summary_path.empty()) {
    write_text(args.summary_path, summary.str());
  } else {
    std::cout << summary.str();
  }
  if (!failures.empty()) {
    std::cerr << failures.size() << " image(s) failed\n";
    return kExitRuntime;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string gt_path;
  std::string detections_path;
  double wall_seconds = 0.0;
  double processed_pixels = 0.0;
  int max_detections = 0;
  std::string out_path;
};

int cmd_eval(const GlobalOptions& global, const EvalArgs& args) {
  const std::vector<Scene> scenes = read_coco_scenes(args.gt_path);
  std::map<long, std::size_t> index_by_id;
  std::vector<ImageResults> images(scenes.size());
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    index_by_id[scenes[i].image_id] = i;
    images[i].ground_truth = scenes[i].objects;
  }
  for (const InterchangeRecord& record : parse_interchange_file(args.detections_path)) {
    const auto it = index_by_id.find(record.image_id);
    if (it == index_by_id.end()) {
      throw std::runtime_error("detection references unknown image id " +
                               std::to_string(record.image_id));
    }
    images[it->second].detections.push_back(record.detection);
  }
  const EvalReport report =
      evaluate(images, args.wall_seconds, args.processed_pixels, args.max_detections);
  std::cout << format_eval_report(report, global.csv());
  if (!args.out_path.empty()) {
    write_text(args.out_path, format_eval_report(report, true));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// saf-build
// ---------------------------------------------------------------------------

struct SafArgs {
  std::string gt_path;
  std::string images_dir;
  std::string out_dir = "saf";
  std::string slicer = "asahi";
  int patch = 512;
  double min_visibility = 0.25;
};

int cmd_saf_build(const GlobalOptions& global, const SafArgs& args) {
  const std::vector<Scene> scenes = read_coco_scenes(args.gt_path);
  SafBuildConfig cfg;
  cfg.slicer = args.slicer == "fixed" ? SliceStrategy::Fixed : SliceStrategy::Asahi;
  cfg.asahi = global.asahi();
  cfg.fixed_patch = args.patch;
  cfg.min_visibility = args.min_visibility;
  cfg.resize_target = global.resize_target;

  const SafDataset dataset = build_saf(scenes, args.images_dir, args.out_dir, cfg);
  const std::vector<SafViolation> violations = verify_saf(dataset.manifest_path);
  std::size_t annotations = 0;
  for (const SafRecord& record : dataset.records) annotations += record.annotations.size();
  std::cout << "records " << dataset.records.size() << " annotations " << annotations
            << " violations " << violations.size() << '\n'
            << "manifest " << dataset.manifest_path << '\n';
  for (const SafViolation& violation : violations) {
    std::cerr << "violation record " << violation.record_id << " " << violation.kind << " "
              << violation.detail << '\n';
  }
  return violations.empty() ? 0 : kExitRuntime;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchArgs {
  std::string resolutions_text;
  int scenes_per_resolution = 3;
  int objects = 120;
  std::string strategies = "adaptive,sahi-512,grid-4,grid-6,grid-12,grid-15";
  int sahi_patch = 512;
  double min_detectable = 4.0;
  std::string out_path;
};

struct BenchRow {
  std::string strategy;
  std::size_t images = 0;
  double plan_pixels = 0;     // sum of Sr + Sa over images
  double input_pixels = 0;    // detector-input pixels actually processed
  double wall_seconds = 0;
  EvalReport eval;
};

int cmd_bench(const GlobalOptions& global, const BenchArgs& args) {
  const std::vector<ImageDims> resolutions = args.resolutions_text.empty()
                                                 ? default_resolutions()
                                                 : parse_resolution_list(args.resolutions_text);
  std::vector<std::string> strategies;
  {
    std::stringstream stream(args.strategies);
    std::string token;
    while (std::getline(stream, token, ',')) {
      if (!token.empty()) strategies.push_back(token);
    }
  }

  // One scene set shared by all strategies.
  std::vector<Scene> scenes;
  for (std::size_t r = 0; r < resolutions.size(); ++r) {
    for (int i = 0; i < args.scenes_per_resolution; ++i) {
      SceneSpec spec;
      spec.seed = global.seed + r * 1000 + static_cast<std::uint64_t>(i);
      spec.dims = resolutions[r];
      spec.object_count = args.objects;
      Scene scene = generate_scene(spec);
      scene.image_id = static_cast<long>(scenes.size() + 1);
      scenes.push_back(std::move(scene));
    }
  }

  OracleParams oracle_params;
  oracle_params.min_detectable_px = args.min_detectable;
  oracle_params.seed = global.seed;

  PipelineConfig cfg;
  cfg.asahi = global.asahi();
  cfg.suppression = global.suppression();
  cfg.parallelism = global.parallelism;

  std::vector<BenchRow> rows;
  for (const std::string& strategy : strategies) {
    BenchRow row;
    row.strategy = strategy;
    std::vector<ImageResults> images;
    const auto start = std::chrono::steady_clock::now();
    for (const Scene& scene : scenes) {
      const SlicePlan plan =
          plan_for_strategy(strategy, scene.dims, global.asahi(), args.sahi_patch);
      OracleDetector detector(scene, oracle_params);
      const PipelineResult result =
          run_planned_pipeline({scene.image_id, scene.dims}, plan, detector, cfg);
      row.plan_pixels += analyze_plan(plan).total;
      row.input_pixels += result.processed_pixels;
      ImageResults image;
      image.detections = result.detections;
      image.ground_truth = scene.objects;
      images.push_back(std::move(image));
      ++row.images;
    }
    row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    row.eval = evaluate(images, row.wall_seconds, row.input_pixels);
    rows.push_back(std::move(row));
  }

  double fixed_plan_pixels = 0;
  for (const BenchRow& row : rows) {
    if (row.strategy == "sahi-512") fixed_plan_pixels = row.plan_pixels;
  }

  std::ostringstream out;
  char buf[320];
  if (global.csv()) {
    out << "strategy,images,plan_px,input_px,wall_s,img_per_s,map,map50,map50_s,map50_m,map50_l,"
           "plan_px_vs_sahi_pct\n";
  } else {
    std::snprintf(buf, sizeof(buf), "%-10s %6s %14s %14s %9s %8s %7s %7s %7s %7s %7s %9s\n",
                  "strategy", "images", "plan_px", "input_px", "wall_s", "img/s", "mAP", "mAP50",
                  "m50_s", "m50_m", "m50_l", "vs_sahi");
    out << buf;
  }
  for (const BenchRow& row : rows) {
    const double vs_sahi =
        fixed_plan_pixels > 0 ? 100.0 * (1.0 - row.plan_pixels / fixed_plan_pixels) : 0.0;
    if (global.csv()) {
      std::snprintf(buf, sizeof(buf), "%s,%zu,%.0f,%.0f,%.4f,%.3f,%.4f,%.4f,%.4f,%.4f,%.4f,%.2f\n",
                    row.strategy.c_str(), row.images, row.plan_pixels, row.input_pixels,
                    row.wall_seconds, row.eval.images_per_second, row.eval.map, row.eval.map50,
                    row.eval.map50_small, row.eval.map50_medium, row.eval.map50_large, vs_sahi);
    } else {
      std::snprintf(buf, sizeof(buf),
                    "%-10s %6zu %14.0f %14.0f %9.4f %8.3f %7.4f %7.4f %7.4f %7.4f %7.4f %8.2f%%\n",
                    row.strategy.c_str(), row.images, row.plan_pixels, row.input_pixels,
                    row.wall_seconds, row.eval.images_per_second, row.eval.map, row.eval.map50,
                    row.eval.map50_small, row.eval.map50_medium, row.eval.map50_large, vs_sahi);
    }
    out << buf;
  }
  std::cout << out.str();
  if (!args.out_path.empty()) write_text(args.out_path, out.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive image-slicing toolkit for small-object detection"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  app.set_config("--config", "", "flat key=value config file; command-line flags override it");

  GlobalOptions global;
  app.add_option("--mu", global.mu, "overlap ratio between adjacent patches")
      ->check(CLI::Range(0.0, 0.999));
  app.add_option("--r", global.limiting_dimension, "limiting dimension for the slice threshold");
  app.add_option("--target", global.resize_target, "uniform detector input size");
  app.add_option("--metric", global.metric, "suppression metric: iou|giou|diou|ciou");
  app.add_option("--threshold", global.suppression_threshold, "suppression threshold");
  app.add_flag("--class-agnostic", global.class_agnostic,
               "let suppression act across class boundaries");
  app.add_option("--parallelism", global.parallelism, "max concurrent detector calls (0 = auto)");
  app.add_option("--seed", global.seed, "run seed");
  app.add_option("--format", global.format, "output format: text|csv")
      ->check(CLI::IsMember({"text", "csv"}));

  PlanArgs plan_args;
  CLI::App* plan = app.add_subcommand("plan", "compute a slice plan for given dimensions");
  plan->add_option("--dims", plan_args.dims_text, "image dimensions as WIDTHxHEIGHT");
  plan->add_option("--image", plan_args.image_path, "PPM image to read dimensions from");
  plan->add_option("--strategy", plan_args.strategy, "asahi|fixed")
      ->check(CLI::IsMember({"asahi", "fixed"}));
  plan->add_option("--patch", plan_args.patch, "patch size for the fixed strategy");
  plan->add_option("-o,--out", plan_args.out_path, "write the report to a file");

  SliceArgs slice_args;
  CLI::App* slice = app.add_subcommand("slice", "extract resized patches from an image");
  slice->add_option("--image", slice_args.image_path, "source PPM image")->required();
  slice->add_option("--out-dir", slice_args.out_dir, "output directory");
  slice->add_option("--strategy", slice_args.strategy, "asahi|fixed")
      ->check(CLI::IsMember({"asahi", "fixed"}));
  slice->add_option("--patch", slice_args.patch, "patch size for the fixed strategy");

  RedundancyArgs redundancy_args;
  CLI::App* redundancy = app.add_subcommand("redundancy", "redundant-area accounting per resolution");
  redundancy->add_option("--resolutions", redundancy_args.resolutions_text,
                         "comma-separated WxH list (defaults to the reference set)");
  redundancy->add_option("--patch", redundancy_args.patch, "fixed baseline patch size");
  redundancy->add_option("-o,--out", redundancy_args.out_path, "also write a CSV file");

  ScenegenArgs scenegen_args;
  CLI::App* scenegen = app.add_subcommand("scenegen", "generate synthetic scenes");
  scenegen->add_option("--out", scenegen_args.out_path, "ground-truth JSON path");
  scenegen->add_option("--scenes", scenegen_args.scene_count, "number of scenes");
  scenegen->add_option("--dims", scenegen_args.dims_text, "scene dimensions WIDTHxHEIGHT");
  scenegen->add_option("--objects", scenegen_args.objects, "objects per scene");
  scenegen->add_option("--classes", scenegen_args.classes, "number of classes");
  scenegen->add_option("--small-fraction", scenegen_args.small_fraction,
                       "target fraction of small objects");
  scenegen->add_option("--crowding", scenegen_args.crowding, "max pairwise IoU between objects");
  scenegen->add_option("--small-edge-min", scenegen_args.small_edge_min, "small edge range low");
  scenegen->add_option("--small-edge-max", scenegen_args.small_edge_max, "small edge range high");
  scenegen->add_option("--big-edge-min", scenegen_args.big_edge_min, "big edge range low");
  scenegen->add_option("--big-edge-max", scenegen_args.big_edge_max, "big edge range high");
  scenegen->add_option("--render-dir", scenegen_args.render_dir, "also render PPM rasters here");

  DetectArgs detect_args;
  CLI::App* detect = app.add_subcommand("detect", "run the dual-pathway pipeline over scenes");
  detect->add_option("--gt", detect_args.gt_path, "ground-truth JSON")->required();
  detect->add_option("--images", detect_args.images_dir, "raster directory (external detector)");
  detect->add_option("--out", detect_args.out_path, "detections interchange file");
  detect->add_option("--summary", detect_args.summary_path, "write the run summary to a file");
  detect->add_option("--detector-cmd", detect_args.detector_command,
                     "external detector command; {input} is replaced by a patch PPM path");
  detect->add_option("--timeout", detect_args.timeout, "external detector timeout, seconds");
  detect->add_option("--min-detectable", detect_args.min_detectable,
                     "oracle: smallest detectable edge at input resolution");
  detect->add_option("--jitter", detect_args.jitter, "oracle: coordinate noise sigma");
  detect->add_option("--miss-rate", detect_args.miss_rate, "oracle: miss probability");
  detect->add_option("--fp-rate", detect_args.fp_rate, "oracle: expected false positives per call");
  detect->add_flag("--no-full-inference", detect_args.no_full_inference,
                   "disable the full-image pass");
  detect->add_flag("--no-patch-overlap", detect_args.no_patch_overlap,
                   "plan slices with zero overlap");
  detect->add_flag("--fail-fast", detect_args.fail_fast, "abort on the first failing image");

  EvalArgs eval_args;
  CLI::App* eval_cmd = app.add_subcommand("eval", "COCO-style evaluation of a detections file");
  eval_cmd->add_option("--gt", eval_args.gt_path, "ground-truth JSON")->required();
  eval_cmd->add_option("--detections", eval_args.detections_path, "interchange file")->required();
  eval_cmd->add_option("--wall-seconds", eval_args.wall_seconds, "wall time for the img/s column");
  eval_cmd->add_option("--processed-pixels", eval_args.processed_pixels,
                       "processed pixel total to report");
  eval_cmd->add_option("--max-dets", eval_args.max_detections,
                       "cap detections per image before scoring (0 = uncapped)");
  eval_cmd->add_option("-o,--out", eval_args.out_path, "also write a CSV file");

  SafArgs saf_args;
  CLI::App* saf = app.add_subcommand("saf-build", "build the fine-tuning dataset");
  saf->add_option("--gt", saf_args.gt_path, "ground-truth JSON")->required();
  saf->add_option("--images", saf_args.images_dir, "source raster directory")->required();
  saf->add_option("--out-dir", saf_args.out_dir, "output directory");
  saf->add_option("--slicer", saf_args.slicer, "asahi|fixed")
      ->check(CLI::IsMember({"asahi", "fixed"}));
  saf->add_option("--patch", saf_args.patch, "patch size for the fixed slicer");
  saf->add_option("--min-visibility", saf_args.min_visibility,
                  "minimum retained area fraction for clipped boxes");

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "compare slicing strategies on synthetic scenes");
  bench->add_option("--resolutions", bench_args.resolutions_text,
                    "comma-separated WxH list (defaults to the reference set)");
  bench->add_option("--scenes-per", bench_args.scenes_per_resolution, "scenes per resolution");
  bench->add_option("--objects", bench_args.objects, "objects per scene");
  bench->add_option("--strategies", bench_args.strategies, "comma-separated strategy list");
  bench->add_option("--sahi-patch", bench_args.sahi_patch, "fixed baseline patch size");
  bench->add_option("--min-detectable", bench_args.min_detectable,
                    "oracle: smallest detectable edge at input resolution");
  bench->add_option("-o,--out", bench_args.out_path, "also write the report to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (plan->parsed()) return cmd_plan(global, plan_args);
    if (slice->parsed()) return cmd_slice(global, slice_args);
    if (redundancy->parsed()) return cmd_redundancy(global, redundancy_args);
    if (scenegen->parsed()) return cmd_scenegen(global, scenegen_args);
    if (detect->parsed()) return cmd_detect(global, detect_args);
    if (eval_cmd->parsed()) return cmd_eval(global, eval_args);
    if (saf->parsed()) return cmd_saf_build(global, saf_args);
    if (bench->parsed()) return cmd_bench(global, bench_args);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
