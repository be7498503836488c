#pragma once

#include <vector>

#include "asahi/detection.hpp"
#include "asahi/geom.hpp"

namespace asahi {

enum class OverlapMetric { Iou, Giou, Diou, Ciou };

double overlap(OverlapMetric metric, const BBox& a, const BBox& b);

struct SuppressionConfig {
  OverlapMetric metric = OverlapMetric::Diou;
  double threshold = 0.5;  // suppress when the metric strictly exceeds this
  bool class_aware = true;

  void validate() const;
};

/// Classic sequential suppression: sort by descending score (ties keep input
/// order), repeatedly keep the best remaining detection and discard every
/// detection whose metric against it exceeds the threshold. This is the
/// reference semantics the matrix formulation must reproduce exactly.
std::vector<Detection> greedy_suppress(std::vector<Detection> dets, const SuppressionConfig& cfg);

struct ClusterResult {
  std::vector<Detection> kept;
  int iterations = 0;  // fixpoint sweeps; bounded by the detection count
};

/// Matrix formulation: with detections score-sorted, build the strictly
/// upper triangular metric matrix, then iterate the keep vector
///   s_j <- [ max_i (s_i * X[i][j]) <= threshold ]
/// to a fixpoint. Output equals greedy_suppress on every input.
ClusterResult cluster_suppress_stats(std::vector<Detection> dets, const SuppressionConfig& cfg);
std::vector<Detection> cluster_suppress(std::vector<Detection> dets, const SuppressionConfig& cfg);

/// Cluster suppression with the DIoU metric at threshold 0.5, class-aware:
/// the default post-processing step of the dual-pathway pipeline.
std::vector<Detection> cdn(std::vector<Detection> dets, bool class_aware = true);

/// Sequential soft suppression: instead of discarding, decay scores by
/// exp(-iou^2 / sigma); detections decayed below score_floor are dropped.
/// Class-aware: detections of different classes never affect each other.
std::vector<Detection> soft_suppress(std::vector<Detection> dets, double sigma,
                                     double score_floor = 1e-3);

/// Weighted boxes fusion: same-class detections whose IoU with a cluster's
/// current fused box exceeds the threshold join that cluster; each cluster
/// yields one detection with score-weighted mean coordinates and the
/// arithmetic mean score.
std::vector<Detection> wbf(std::vector<Detection> dets, double iou_threshold);

}  // namespace asahi
