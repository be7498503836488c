#pragma once

#include <cstdint>
#include <vector>

#include "asahi/detection.hpp"
#include "asahi/detector.hpp"
#include "asahi/nms.hpp"
#include "asahi/slicing.hpp"

namespace asahi {

struct PipelineConfig {
  AsahiConfig asahi;
  SuppressionConfig suppression;  // defaults to DIoU at 0.5, class-aware
  bool enable_full_inference = true;
  bool enable_patch_overlap = true;  // when off, slices are planned with zero overlap
  int parallelism = 0;               // 0 picks the hardware concurrency

  void validate() const;
};

struct StageTimings {
  double plan_s = 0;
  double inference_s = 0;
  double merge_s = 0;
  double suppress_s = 0;

  double total_s() const { return plan_s + inference_s + merge_s + suppress_s; }
};

struct PipelineResult {
  std::vector<Detection> detections;  // final, score-sorted
  int grid_rows = 0;
  int grid_cols = 0;
  std::size_t raw_slice_detections = 0;
  std::size_t raw_full_detections = 0;
  std::size_t merged_detections = 0;
  std::size_t final_detections = 0;
  std::size_t dropped_after_remap = 0;
  std::size_t detector_calls = 0;
  double processed_pixels = 0;  // detector-input pixels summed over calls
  StageTimings timings;
};

struct RemapResult {
  std::vector<Detection> detections;
  std::size_t dropped = 0;  // boxes that vanished when clipped
};

/// Transfers patch-frame detections into the full-image frame: divide by the
/// patch scale, offset by the window origin, clip to the window rectangle.
/// Detections that clip to nothing are dropped. Origin is set to the window's
/// grid cell.
RemapResult remap_to_image(const std::vector<Detection>& patch_dets, const SliceWindow& window,
                           double scale_x, double scale_y);

struct PipelineInput {
  long image_id = 0;
  ImageDims dims{1, 1};
};

/// The dual-pathway pipeline: a full-image pass at the uniform input size
/// (when enabled) plus one pass per adaptive slice, remapped, merged and
/// suppressed. Patch requests may run concurrently when the adapter allows
/// it; results are re-sorted (full pass first, then slices row-major, then
/// score) before suppression so the output never depends on scheduling.
PipelineResult run_pipeline(const PipelineInput& input, DetectorAdapter& detector,
                            const PipelineConfig& cfg);

/// Same pipeline over a caller-supplied slice plan (adaptive or any of the
/// fixed comparison grids).
PipelineResult run_planned_pipeline(const PipelineInput& input, const SlicePlan& plan,
                                    DetectorAdapter& detector, const PipelineConfig& cfg);

/// Suppression restricted to pairs whose origins can actually collide: the
/// full-inference pass or adjacent slices (8-neighborhood). Detections from
/// one and the same slice are left alone. Measures the suppression work the
/// overlap regions generate.
std::vector<Detection> dedupe_cross_slice(std::vector<Detection> dets,
                                          const SuppressionConfig& cfg = SuppressionConfig{});

}  // namespace asahi
