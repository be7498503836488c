#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "asahi/detection.hpp"
#include "asahi/raster.hpp"
#include "asahi/scene.hpp"
#include "asahi/slicing.hpp"

namespace asahi {

/// Maps an object's visible size at the detector input to a confidence:
/// score = max_score * v / (v + size_half), with v the scaled shorter edge.
struct ScoreModel {
  double max_score = 0.95;
  double size_half = 8.0;

  double score_for(double scaled_shorter_edge) const;
};

/// Knobs of the simulated detector. min_detectable_px is the shorter-edge
/// length, measured at the detector's input resolution, below which an
/// object is invisible: the mechanism that makes whole-image downscaling
/// lose small objects while slices keep them.
struct OracleParams {
  double min_detectable_px = 4.0;
  double jitter_sigma = 0.0;  // Gaussian coordinate noise, patch pixels
  double miss_rate = 0.0;
  double fp_rate = 0.0;  // expected false positives per invocation
  ScoreModel score_model;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Everything an adapter needs to know about one inference request. The
/// patch is the region rectangle resampled by (scale_x, scale_y); detections
/// come back in patch coordinates.
struct PatchContext {
  long image_id = 0;
  ImageDims source{1, 1};
  bool full_image = false;
  int row = -1, col = -1;
  int region_x1 = 0, region_y1 = 0, region_x2 = 1, region_y2 = 1;  // source-frame rect
  double scale_x = 1.0, scale_y = 1.0;
  int patch_w = 1, patch_h = 1;

  int region_width() const { return region_x2 - region_x1; }
  int region_height() const { return region_y2 - region_y1; }
  SliceWindow window() const { return {region_x1, region_y1, region_x2, region_y2, row, col}; }
};

class DetectorAdapter {
 public:
  enum class Capability { Serial, Concurrent };

  virtual ~DetectorAdapter() = default;
  virtual Capability capability() const = 0;
  /// Returns detections in patch coordinates.
  virtual std::vector<Detection> detect(const PatchContext& ctx) = 0;
};

/// Core oracle rule, exposed for direct testing. `visible` holds the
/// ground-truth objects fully contained in the request's region, in source
/// coordinates; partially clipped objects are the enclosing slice's (or the
/// full pass's) responsibility and are not reported. Output is reproducible
/// from (params.seed, region identity) alone.
std::vector<Detection> oracle_detect(const std::vector<GtObject>& visible,
                                     const OracleParams& params, const PatchContext& ctx);

/// Ground-truth-driven simulated detector over one scene.
class OracleDetector : public DetectorAdapter {
 public:
  OracleDetector(const Scene& scene, const OracleParams& params);

  Capability capability() const override { return Capability::Concurrent; }
  std::vector<Detection> detect(const PatchContext& ctx) override;

 private:
  const Scene* scene_;
  OracleParams params_;
};

struct CommandResult {
  int exit_code = -1;
  bool timed_out = false;
  std::string output;       // captured standard output
  std::string diagnostics;  // captured standard error
};

/// Runs a shell command with a wall-clock deadline, capturing both streams.
CommandResult run_command_capture(const std::string& command, double timeout_seconds);

/// Adapter that shells out per patch: the patch raster is written as a P6
/// PPM, `{input}` in the command template is replaced with its path, and
/// detections are parsed from the command's standard output in the
/// interchange format (patch coordinates).
class ExternalDetector : public DetectorAdapter {
 public:
  ExternalDetector(const Raster& image, std::string command_template, std::string scratch_dir,
                   double timeout_seconds = 30.0);

  Capability capability() const override { return Capability::Serial; }
  std::vector<Detection> detect(const PatchContext& ctx) override;

 private:
  const Raster* image_;
  std::string command_template_;
  std::string scratch_dir_;
  double timeout_seconds_;
  int call_count_ = 0;
};

}  // namespace asahi
