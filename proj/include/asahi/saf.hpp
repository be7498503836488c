#pragma once

#include <string>
#include <vector>

#include "asahi/scene.hpp"
#include "asahi/slicing.hpp"

namespace asahi {

struct SafAnnotation {
  int class_id;
  BBox box;           // patch frame
  double visibility;  // clipped area / original area, in (0, 1]
};

/// One emitted training sample: the whole resized image or one slice patch.
struct SafRecord {
  long record_id = 0;
  long source_image_id = 0;
  bool full_image = false;
  SliceWindow window;  // source-frame rect the raster was cut from
  std::string raster_path;
  int patch_w = 0, patch_h = 0;
  double scale_x = 1.0, scale_y = 1.0;
  std::vector<SafAnnotation> annotations;
};

struct SafBuildConfig {
  SliceStrategy slicer = SliceStrategy::Asahi;
  AsahiConfig asahi;     // planner parameters for the Asahi slicer
  int fixed_patch = 512; // patch size for the Fixed slicer
  double min_visibility = 0.25;
  int resize_target = 512;

  void validate() const;
};

struct SafDataset {
  std::vector<SafRecord> records;
  std::string manifest_path;  // COCO-format JSON
  std::string index_path;     // line-oriented record index
};

/// Builds the fine-tuning dataset under out_dir: per image one full-frame
/// record (resized to the target) plus one record per slice window. Ground
/// truth is clipped to each window; clips retaining less than min_visibility
/// of the original area are discarded; survivors are transformed to patch
/// coordinates. No augmentation of any kind is applied.
SafDataset build_saf(const std::vector<Scene>& scenes, const std::string& image_dir,
                     const std::string& out_dir, const SafBuildConfig& cfg);

struct SafViolation {
  long record_id;
  std::string kind;  // MISSING_RASTER | RASTER_MISMATCH | BOX_OUT_OF_FRAME | BAD_VISIBILITY
  std::string detail;
};

/// Re-checks every record of an existing manifest: raster present and of the
/// declared size, every annotation box valid and inside the patch, every
/// visibility within (0,1] and at or above the manifest's threshold.
/// Violations are data, not errors.
std::vector<SafViolation> verify_saf(const std::string& manifest_path);

/// Loads a manifest written by build_saf.
std::vector<SafRecord> read_saf_manifest(const std::string& manifest_path,
                                         double* min_visibility = nullptr);

}  // namespace asahi
