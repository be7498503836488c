#pragma once

#include <string>
#include <vector>

#include "asahi/detection.hpp"
#include "asahi/scene.hpp"

namespace asahi {

/// Greedy score-ordered matching: each detection claims the unclaimed
/// ground-truth box of its class with the highest IoU at or above the
/// threshold. Assignments are indexed by the detections' input positions.
struct MatchResult {
  std::vector<int> det_to_gt;  // ground-truth index or -1 per detection
  int false_negatives = 0;
};
MatchResult match(const std::vector<Detection>& dets, const std::vector<GtObject>& gts,
                  double iou_threshold, bool class_aware = true);

enum class SizeBucket { Small, Medium, Large };

/// Small: area < 32^2. Medium: 32^2 <= area <= 96^2. Large: area > 96^2.
/// Areas in source-image pixels.
SizeBucket size_bucket(const BBox& gt_box);

struct ScoredFlag {
  double score;
  bool tp;
};

/// 101-point interpolated average precision: the precision envelope sampled
/// at recalls 0.00, 0.01, ..., 1.00. Returns 0 when there are ground truths
/// but no detections; gt_count must be positive.
double average_precision_101(std::vector<ScoredFlag> dets, std::size_t gt_count);

struct ClassAp {
  int class_id = 0;
  double ap = 0;    // averaged over IoU thresholds 0.50:0.05:0.95
  double ap50 = 0;  // at IoU 0.5
};

struct EvalReport {
  double map = 0;
  double map75 = 0;
  double map50 = 0;
  double map50_small = 0;
  double map50_medium = 0;
  double map50_large = 0;
  std::vector<ClassAp> per_class;
  double images_per_second = 0;
  double processed_pixels_total = 0;
};

struct ImageResults {
  std::vector<Detection> detections;
  std::vector<GtObject> ground_truth;
};

/// Full COCO-style report. Classes absent from the ground truth are excluded
/// from every mean. Size-bucketed columns restrict ground truths to the
/// bucket; detections matched to an out-of-bucket ground truth are ignored,
/// unmatched detections count as false positives in every bucket.
/// max_detections > 0 keeps only the top-scored detections per image (the
/// usual 100-detection cap); 0 means uncapped, the default, since dense
/// scenes legitimately exceed it.
EvalReport evaluate(const std::vector<ImageResults>& images, double wall_seconds = 0.0,
                    double processed_pixels = 0.0, int max_detections = 0);

std::string format_eval_report(const EvalReport& report, bool csv);

}  // namespace asahi
