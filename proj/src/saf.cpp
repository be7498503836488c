#include "asahi/saf.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "asahi/raster.hpp"

namespace asahi {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Clips gt to the window; returns annotations in patch coordinates.
std::vector<SafAnnotation> clip_annotations(const std::vector<GtObject>& objects,
                                            const SliceWindow& window, double scale_x,
                                            double scale_y, double min_visibility) {
  std::vector<SafAnnotation> annotations;
  for (const GtObject& object : objects) {
    const double x1 = std::max(object.box.x1(), static_cast<double>(window.x1));
    const double y1 = std::max(object.box.y1(), static_cast<double>(window.y1));
    const double x2 = std::min(object.box.x2(), static_cast<double>(window.x2));
    const double y2 = std::min(object.box.y2(), static_cast<double>(window.y2));
    if (!(x2 > x1 && y2 > y1)) continue;
    const double visibility = ((x2 - x1) * (y2 - y1)) / area(object.box);
    if (visibility < min_visibility) continue;
    annotations.push_back({object.class_id,
                           BBox((x1 - window.x1) * scale_x, (y1 - window.y1) * scale_y,
                                (x2 - window.x1) * scale_x, (y2 - window.y1) * scale_y),
                           visibility});
  }
  return annotations;
}

SafRecord make_record(long record_id, const Scene& scene, const SliceWindow& window,
                      bool full_image, const Raster& image, const std::string& out_dir,
                      const SafBuildConfig& cfg) {
  SafRecord record;
  record.record_id = record_id;
  record.source_image_id = scene.image_id;
  record.full_image = full_image;
  record.window = window;

  const PatchResult patch = extract_patch(image, window, cfg.resize_target);
  record.patch_w = patch.patch.width;
  record.patch_h = patch.patch.height;
  record.scale_x = patch.scale_x;
  record.scale_y = patch.scale_y;

  const std::string name = "img" + std::to_string(scene.image_id) +
                           (full_image ? "_full"
                                       : "_r" + std::to_string(window.row) + "c" +
                                             std::to_string(window.col)) +
                           ".ppm";
  record.raster_path = (fs::path(out_dir) / name).string();
  write_ppm(patch.patch, record.raster_path);

  record.annotations = clip_annotations(scene.objects, window, patch.scale_x, patch.scale_y,
                                        full_image ? 0.0 : cfg.min_visibility);
  return record;
}

}  // namespace

void SafBuildConfig::validate() const {
  asahi.validate();
  if (fixed_patch < 1) throw std::invalid_argument("SafBuildConfig: patch size must be positive");
  if (!(min_visibility > 0.0 && min_visibility <= 1.0)) {
    throw std::invalid_argument("SafBuildConfig: min visibility must be in (0,1]");
  }
  if (resize_target < 1) throw std::invalid_argument("SafBuildConfig: target must be positive");
}

SafDataset build_saf(const std::vector<Scene>& scenes, const std::string& image_dir,
                     const std::string& out_dir, const SafBuildConfig& cfg) {
  cfg.validate();
  fs::create_directories(out_dir);

  SafDataset dataset;
  long record_id = 1;
  for (const Scene& scene : scenes) {
    const fs::path source = fs::path(image_dir) / scene.file_name;
    if (scene.file_name.empty() || !fs::exists(source)) {
      throw std::runtime_error("build_saf: missing image for scene " +
                               std::to_string(scene.image_id) + ": " + source.string());
    }
    const Raster image = read_ppm(source.string());
    if (image.width != scene.dims.width || image.height != scene.dims.height) {
      throw std::runtime_error("build_saf: raster size disagrees with annotations for " +
                               source.string());
    }

    const SliceWindow whole{0, 0, scene.dims.width, scene.dims.height, -1, -1};
    dataset.records.push_back(make_record(record_id++, scene, whole, true, image, out_dir, cfg));

    const SlicePlan plan = cfg.slicer == SliceStrategy::Asahi
                               ? asahi_plan(scene.dims, cfg.asahi)
                               : fixed_plan(scene.dims, cfg.fixed_patch, cfg.asahi.overlap_ratio);
    for (const SliceWindow& window : plan.windows) {
      dataset.records.push_back(make_record(record_id++, scene, window, false, image, out_dir, cfg));
    }
  }

  // Manifest: COCO-format JSON, one image entry per record.
  json root;
  root["info"] = {{"min_visibility", cfg.min_visibility},
                  {"resize_target", cfg.resize_target},
                  {"slicer", cfg.slicer == SliceStrategy::Asahi ? "asahi" : "fixed"}};
  root["images"] = json::array();
  root["annotations"] = json::array();
  root["categories"] = json::array();
  std::set<int> class_ids;
  long annotation_id = 1;
  for (const SafRecord& record : dataset.records) {
    root["images"].push_back({{"id", record.record_id},
                              {"width", record.patch_w},
                              {"height", record.patch_h},
                              {"file_name", fs::path(record.raster_path).filename().string()},
                              {"source_image_id", record.source_image_id},
                              {"kind", record.full_image ? "full" : "slice"},
                              {"row", record.window.row},
                              {"col", record.window.col},
                              {"window", {record.window.x1, record.window.y1, record.window.x2,
                                          record.window.y2}},
                              {"scale_x", record.scale_x},
                              {"scale_y", record.scale_y}});
    for (const SafAnnotation& ann : record.annotations) {
      class_ids.insert(ann.class_id);
      root["annotations"].push_back({{"id", annotation_id++},
                                     {"image_id", record.record_id},
                                     {"category_id", ann.class_id},
                                     {"bbox", {ann.box.x1(), ann.box.y1(), ann.box.width(),
                                               ann.box.height()}},
                                     {"area", area(ann.box)},
                                     {"visibility", ann.visibility},
                                     {"iscrowd", 0}});
    }
  }
  for (int class_id : class_ids) {
    root["categories"].push_back({{"id", class_id}, {"name", "class_" + std::to_string(class_id)}});
  }

  dataset.manifest_path = (fs::path(out_dir) / "saf_manifest.json").string();
  std::ofstream manifest(dataset.manifest_path);
  if (!manifest) throw std::runtime_error("build_saf: cannot write " + dataset.manifest_path);
  manifest << root.dump(2) << '\n';

  dataset.index_path = (fs::path(out_dir) / "saf_index.txt").string();
  std::ofstream index(dataset.index_path);
  if (!index) throw std::runtime_error("build_saf: cannot write " + dataset.index_path);
  for (const SafRecord& record : dataset.records) {
    index << record.record_id << ' ' << record.source_image_id << ' '
          << (record.full_image ? "full" : "slice") << ' ' << record.window.row << ' '
          << record.window.col << ' ' << fs::path(record.raster_path).filename().string() << ' '
          << record.annotations.size() << '\n';
  }
  return dataset;
}

std::vector<SafRecord> read_saf_manifest(const std::string& manifest_path,
                                         double* min_visibility) {
  std::ifstream in(manifest_path);
  if (!in) throw std::runtime_error("read_saf_manifest: cannot open " + manifest_path);
  json root;
  in >> root;
  if (min_visibility != nullptr) {
    *min_visibility = root.at("info").at("min_visibility").get<double>();
  }
  const fs::path dir = fs::path(manifest_path).parent_path();

  std::vector<SafRecord> records;
  std::map<long, std::size_t> index_by_id;
  for (const json& image : root.at("images")) {
    SafRecord record;
    record.record_id = image.at("id").get<long>();
    record.source_image_id = image.at("source_image_id").get<long>();
    record.full_image = image.at("kind").get<std::string>() == "full";
    record.patch_w = image.at("width").get<int>();
    record.patch_h = image.at("height").get<int>();
    const auto& window = image.at("window");
    record.window = {window.at(0).get<int>(), window.at(1).get<int>(), window.at(2).get<int>(),
                     window.at(3).get<int>(), image.at("row").get<int>(),
                     image.at("col").get<int>()};
    record.scale_x = image.at("scale_x").get<double>();
    record.scale_y = image.at("scale_y").get<double>();
    record.raster_path = (dir / image.at("file_name").get<std::string>()).string();
    index_by_id[record.record_id] = records.size();
    records.push_back(std::move(record));
  }
  for (const json& ann : root.at("annotations")) {
    const long record_id = ann.at("image_id").get<long>();
    const auto it = index_by_id.find(record_id);
    if (it == index_by_id.end()) {
      throw std::runtime_error("read_saf_manifest: annotation references unknown record " +
                               std::to_string(record_id));
    }
    const auto& bbox = ann.at("bbox");
    const double x = bbox.at(0).get<double>();
    const double y = bbox.at(1).get<double>();
    const double w = bbox.at(2).get<double>();
    const double h = bbox.at(3).get<double>();
    records[it->second].annotations.push_back({ann.at("category_id").get<int>(),
                                               BBox(x, y, x + w, y + h),
                                               ann.at("visibility").get<double>()});
  }
  return records;
}

std::vector<SafViolation> verify_saf(const std::string& manifest_path) {
  double min_visibility = 0.0;
  const std::vector<SafRecord> records = read_saf_manifest(manifest_path, &min_visibility);

  std::vector<SafViolation> violations;
  constexpr double kFrameTolerance = 1e-6;
  for (const SafRecord& record : records) {
    if (!fs::exists(record.raster_path)) {
      violations.push_back({record.record_id, "MISSING_RASTER", record.raster_path});
    } else {
      try {
        const Raster raster = read_ppm(record.raster_path);
        if (raster.width != record.patch_w || raster.height != record.patch_h) {
          violations.push_back({record.record_id, "RASTER_MISMATCH",
                                "declared " + std::to_string(record.patch_w) + "x" +
                                    std::to_string(record.patch_h) + ", file " +
                                    std::to_string(raster.width) + "x" +
                                    std::to_string(raster.height)});
        }
      } catch (const std::exception& e) {
        violations.push_back({record.record_id, "MISSING_RASTER", e.what()});
      }
    }
    for (std::size_t i = 0; i < record.annotations.size(); ++i) {
      const SafAnnotation& ann = record.annotations[i];
      if (ann.box.x1() < -kFrameTolerance || ann.box.y1() < -kFrameTolerance ||
          ann.box.x2() > record.patch_w + kFrameTolerance ||
          ann.box.y2() > record.patch_h + kFrameTolerance) {
        violations.push_back({record.record_id, "BOX_OUT_OF_FRAME",
                              "annotation " + std::to_string(i)});
      }
      const bool full_frame_exempt = record.full_image;  // full records keep every box
      if (ann.visibility <= 0.0 || ann.visibility > 1.0 + kFrameTolerance ||
          (!full_frame_exempt && ann.visibility < min_visibility - kFrameTolerance)) {
        violations.push_back(
            {record.record_id, "BAD_VISIBILITY",
             "annotation " + std::to_string(i) + " visibility " + std::to_string(ann.visibility)});
      }
    }
  }
  return violations;
}

}  // namespace asahi
