#include "asahi/nms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace asahi {

namespace {

// Below any admissible threshold: marks pairs that can never suppress.
constexpr double kNeverSuppress = -4.0;

void stable_sort_by_score(std::vector<Detection>& dets) {
  std::stable_sort(dets.begin(), dets.end(),
                   [](const Detection& a, const Detection& b) { return a.score > b.score; });
}

}  // namespace

double overlap(OverlapMetric metric, const BBox& a, const BBox& b) {
  switch (metric) {
    case OverlapMetric::Iou:
      return iou(a, b);
    case OverlapMetric::Giou:
      return giou(a, b);
    case OverlapMetric::Diou:
      return diou(a, b);
    case OverlapMetric::Ciou:
      return ciou(a, b);
  }
  throw std::invalid_argument("overlap: unknown metric");
}

void SuppressionConfig::validate() const {
  if (!(threshold > -1.0 && threshold <= 1.0)) {
    throw std::invalid_argument("SuppressionConfig: threshold must be in (-1, 1]");
  }
}

std::vector<Detection> greedy_suppress(std::vector<Detection> dets, const SuppressionConfig& cfg) {
  cfg.validate();
  stable_sort_by_score(dets);
  std::vector<Detection> kept;
  kept.reserve(dets.size());
  std::vector<char> alive(dets.size(), 1);
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (!alive[i]) continue;
    kept.push_back(dets[i]);
    for (std::size_t j = i + 1; j < dets.size(); ++j) {
      if (!alive[j]) continue;
      if (cfg.class_aware && dets[i].class_id != dets[j].class_id) continue;
      if (overlap(cfg.metric, dets[i].box, dets[j].box) > cfg.threshold) alive[j] = 0;
    }
  }
  return kept;
}

ClusterResult cluster_suppress_stats(std::vector<Detection> dets, const SuppressionConfig& cfg) {
  cfg.validate();
  stable_sort_by_score(dets);
  const std::size_t n = dets.size();
  ClusterResult result;
  if (n == 0) return result;

  // Strictly upper triangular metric matrix, row-packed.
  std::vector<double> matrix(n * n, kNeverSuppress);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (cfg.class_aware && dets[i].class_id != dets[j].class_id) continue;
      matrix[i * n + j] = overlap(cfg.metric, dets[i].box, dets[j].box);
    }
  }

  // The first undecided position stabilizes every sweep (entries only look
  // at earlier rows), so the fixpoint arrives within n sweeps.
  std::vector<char> keep(n, 1);
  std::vector<char> next(n, 1);
  for (;;) {
    ++result.iterations;
    for (std::size_t j = 0; j < n; ++j) {
      double worst = kNeverSuppress;
      for (std::size_t i = 0; i < j; ++i) {
        if (keep[i]) worst = std::max(worst, matrix[i * n + j]);
      }
      next[j] = worst <= cfg.threshold ? 1 : 0;
    }
    if (next == keep) break;
    std::swap(keep, next);
  }

  result.kept.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (keep[i]) result.kept.push_back(dets[i]);
  }
  return result;
}

std::vector<Detection> cluster_suppress(std::vector<Detection> dets, const SuppressionConfig& cfg) {
  return cluster_suppress_stats(std::move(dets), cfg).kept;
}

std::vector<Detection> cdn(std::vector<Detection> dets, bool class_aware) {
  SuppressionConfig cfg;
  cfg.metric = OverlapMetric::Diou;
  cfg.threshold = 0.5;
  cfg.class_aware = class_aware;
  return cluster_suppress(std::move(dets), cfg);
}

std::vector<Detection> soft_suppress(std::vector<Detection> dets, double sigma,
                                     double score_floor) {
  if (!(sigma > 0.0)) throw std::invalid_argument("soft_suppress: sigma must be positive");
  stable_sort_by_score(dets);
  std::vector<Detection> kept;
  kept.reserve(dets.size());
  // dets acts as the working pool, already sorted; process best-first.
  std::vector<char> consumed(dets.size(), 0);
  for (;;) {
    std::size_t best = dets.size();
    for (std::size_t i = 0; i < dets.size(); ++i) {
      if (!consumed[i] && (best == dets.size() || dets[i].score > dets[best].score)) best = i;
    }
    if (best == dets.size()) break;
    consumed[best] = 1;
    kept.push_back(dets[best]);
    for (std::size_t j = 0; j < dets.size(); ++j) {
      if (consumed[j] || dets[j].class_id != dets[best].class_id) continue;
      const double v = iou(dets[best].box, dets[j].box);
      dets[j].score *= std::exp(-(v * v) / sigma);
      if (dets[j].score < score_floor) consumed[j] = 1;  // dropped
    }
  }
  return kept;
}

std::vector<Detection> wbf(std::vector<Detection> dets, double iou_threshold) {
  stable_sort_by_score(dets);
  struct Cluster {
    int class_id;
    double weight_sum;  // sum of member scores
    double score_sum;
    std::size_t members;
    double wx1, wy1, wx2, wy2;  // score-weighted coordinate sums
    BBox fused() const {
      return BBox(wx1 / weight_sum, wy1 / weight_sum, wx2 / weight_sum, wy2 / weight_sum);
    }
  };
  std::vector<Cluster> clusters;
  for (const Detection& det : dets) {
    Cluster* home = nullptr;
    for (Cluster& cluster : clusters) {
      if (cluster.class_id != det.class_id) continue;
      if (iou(cluster.fused(), det.box) > iou_threshold) {
        home = &cluster;
        break;
      }
    }
    if (home == nullptr) {
      clusters.push_back({det.class_id, 0.0, 0.0, 0, 0.0, 0.0, 0.0, 0.0});
      home = &clusters.back();
    }
    const double weight = std::max(det.score, 1e-12);  // keep the mean defined at score 0
    home->weight_sum += weight;
    home->score_sum += det.score;
    home->members += 1;
    home->wx1 += weight * det.box.x1();
    home->wy1 += weight * det.box.y1();
    home->wx2 += weight * det.box.x2();
    home->wy2 += weight * det.box.y2();
  }
  std::vector<Detection> fused;
  fused.reserve(clusters.size());
  for (const Cluster& cluster : clusters) {
    fused.emplace_back(cluster.class_id, cluster.score_sum / cluster.members, cluster.fused());
  }
  stable_sort_by_score(fused);
  return fused;
}

}  // namespace asahi
