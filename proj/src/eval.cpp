#include "asahi/eval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace asahi {

namespace {

constexpr std::array<double, 10> kIouThresholds = {0.50, 0.55, 0.60, 0.65, 0.70,
                                                   0.75, 0.80, 0.85, 0.90, 0.95};
constexpr double kSmallAreaMax = 32.0 * 32.0;
constexpr double kMediumAreaMax = 96.0 * 96.0;

// Per-detection outcome for one class at one IoU threshold, dataset-wide.
struct Outcome {
  double score;
  int matched_bucket;  // -1 unmatched, else SizeBucket of the claimed gt
};

}  // namespace

MatchResult match(const std::vector<Detection>& dets, const std::vector<GtObject>& gts,
                  double iou_threshold, bool class_aware) {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw std::invalid_argument("match: IoU threshold must be in (0,1)");
  }
  MatchResult result;
  result.det_to_gt.assign(dets.size(), -1);

  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].score > dets[b].score;
  });

  std::vector<char> claimed(gts.size(), 0);
  for (std::size_t idx : order) {
    const Detection& det = dets[idx];
    int best = -1;
    double best_iou = iou_threshold;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (claimed[g]) continue;
      if (class_aware && gts[g].class_id != det.class_id) continue;
      const double v = iou(det.box, gts[g].box);
      if (v > best_iou || (best < 0 && v == best_iou)) {
        best = static_cast<int>(g);
        best_iou = v;
      }
    }
    if (best >= 0) {
      claimed[static_cast<std::size_t>(best)] = 1;
      result.det_to_gt[idx] = best;
    }
  }
  result.false_negatives =
      static_cast<int>(std::count(claimed.begin(), claimed.end(), 0));
  return result;
}

SizeBucket size_bucket(const BBox& gt_box) {
  const double a = area(gt_box);
  if (a < kSmallAreaMax) return SizeBucket::Small;
  if (a <= kMediumAreaMax) return SizeBucket::Medium;
  return SizeBucket::Large;
}

double average_precision_101(std::vector<ScoredFlag> dets, std::size_t gt_count) {
  if (gt_count == 0) throw std::invalid_argument("average_precision_101: no ground truth");
  if (dets.empty()) return 0.0;
  std::stable_sort(dets.begin(), dets.end(),
                   [](const ScoredFlag& a, const ScoredFlag& b) { return a.score > b.score; });

  std::vector<double> recall(dets.size()), precision(dets.size());
  std::size_t tp = 0;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (dets[i].tp) ++tp;
    recall[i] = static_cast<double>(tp) / gt_count;
    precision[i] = static_cast<double>(tp) / (i + 1);
  }
  // Precision envelope: monotone non-increasing from the right.
  for (std::size_t i = dets.size() - 1; i-- > 0;) {
    precision[i] = std::max(precision[i], precision[i + 1]);
  }
  double sum = 0;
  std::size_t k = 0;
  for (int i = 0; i <= 100; ++i) {
    const double r = i / 100.0;
    while (k < dets.size() && recall[k] < r - 1e-12) ++k;
    if (k == dets.size()) break;
    sum += precision[k];
  }
  return sum / 101.0;
}

EvalReport evaluate(const std::vector<ImageResults>& images, double wall_seconds,
                    double processed_pixels, int max_detections) {
  // gt counts per class, overall and per bucket
  std::map<int, std::size_t> gt_count;
  std::map<int, std::array<std::size_t, 3>> gt_bucket_count;
  for (const ImageResults& image : images) {
    for (const GtObject& gt : image.ground_truth) {
      ++gt_count[gt.class_id];
      ++gt_bucket_count[gt.class_id][static_cast<int>(size_bucket(gt.box))];
    }
  }

  // outcomes[class][threshold] over the whole dataset
  std::map<int, std::array<std::vector<Outcome>, kIouThresholds.size()>> outcomes;
  for (const ImageResults& source : images) {
    ImageResults capped;
    const ImageResults* image = &source;
    if (max_detections > 0 &&
        source.detections.size() > static_cast<std::size_t>(max_detections)) {
      capped = source;
      std::stable_sort(capped.detections.begin(), capped.detections.end(),
                       [](const Detection& a, const Detection& b) { return a.score > b.score; });
      capped.detections.erase(capped.detections.begin() + max_detections,
                              capped.detections.end());
      image = &capped;
    }
    for (std::size_t t = 0; t < kIouThresholds.size(); ++t) {
      const MatchResult m = match(image->detections, image->ground_truth, kIouThresholds[t], true);
      for (std::size_t d = 0; d < image->detections.size(); ++d) {
        const Detection& det = image->detections[d];
        const int g = m.det_to_gt[d];
        const int bucket =
            g < 0 ? -1
                  : static_cast<int>(
                        size_bucket(image->ground_truth[static_cast<std::size_t>(g)].box));
        outcomes[det.class_id][t].push_back({det.score, bucket});
      }
    }
  }

  EvalReport report;
  std::vector<double> ap_at_t(kIouThresholds.size(), 0.0);
  std::vector<std::vector<double>> per_t_class_aps(kIouThresholds.size());

  std::vector<double> bucket_ap_means(3, 0.0);
  std::array<std::vector<double>, 3> bucket_class_aps;

  for (const auto& [class_id, per_class_gt] : gt_count) {
    if (per_class_gt == 0) continue;
    ClassAp entry;
    entry.class_id = class_id;
    double class_sum = 0;
    for (std::size_t t = 0; t < kIouThresholds.size(); ++t) {
      std::vector<ScoredFlag> flags;
      const auto it = outcomes.find(class_id);
      if (it != outcomes.end()) {
        flags.reserve(it->second[t].size());
        for (const Outcome& o : it->second[t]) flags.push_back({o.score, o.matched_bucket >= 0});
      }
      const double ap = average_precision_101(std::move(flags), per_class_gt);
      per_t_class_aps[t].push_back(ap);
      class_sum += ap;
      if (t == 0) entry.ap50 = ap;
    }
    entry.ap = class_sum / kIouThresholds.size();
    report.per_class.push_back(entry);

    // Size buckets at IoU 0.5: restrict gts to the bucket; detections matched
    // to an out-of-bucket gt are ignored, unmatched ones stay false positives.
    for (int bucket = 0; bucket < 3; ++bucket) {
      const std::size_t bucket_gt = gt_bucket_count[class_id][bucket];
      if (bucket_gt == 0) continue;
      std::vector<ScoredFlag> flags;
      const auto it = outcomes.find(class_id);
      if (it != outcomes.end()) {
        for (const Outcome& o : it->second[0]) {
          if (o.matched_bucket >= 0 && o.matched_bucket != bucket) continue;  // ignored
          flags.push_back({o.score, o.matched_bucket == bucket});
        }
      }
      bucket_class_aps[bucket].push_back(average_precision_101(std::move(flags), bucket_gt));
    }
  }

  for (std::size_t t = 0; t < kIouThresholds.size(); ++t) {
    ap_at_t[t] = per_t_class_aps[t].empty()
                     ? 0.0
                     : std::accumulate(per_t_class_aps[t].begin(), per_t_class_aps[t].end(), 0.0) /
                           per_t_class_aps[t].size();
  }
  report.map = std::accumulate(ap_at_t.begin(), ap_at_t.end(), 0.0) / ap_at_t.size();
  report.map50 = ap_at_t[0];
  report.map75 = ap_at_t[5];
  for (int bucket = 0; bucket < 3; ++bucket) {
    bucket_ap_means[static_cast<std::size_t>(bucket)] =
        bucket_class_aps[bucket].empty()
            ? 0.0
            : std::accumulate(bucket_class_aps[bucket].begin(), bucket_class_aps[bucket].end(),
                              0.0) /
                  bucket_class_aps[bucket].size();
  }
  report.map50_small = bucket_ap_means[0];
  report.map50_medium = bucket_ap_means[1];
  report.map50_large = bucket_ap_means[2];

  if (gt_count.empty()) {
    report.map = report.map50 = report.map75 = 0.0;
  }
  if (wall_seconds > 0.0 && !images.empty()) {
    report.images_per_second = images.size() / wall_seconds;
  }
  report.processed_pixels_total = processed_pixels;
  return report;
}

std::string format_eval_report(const EvalReport& report, bool csv) {
  std::ostringstream out;
  char buf[256];
  if (csv) {
    out << "metric,value\n";
    std::snprintf(buf, sizeof(buf),
                  "mAP,%.4f\nmAP75,%.4f\nmAP50,%.4f\nmAP50_s,%.4f\nmAP50_m,%.4f\nmAP50_l,%.4f\n"
                  "images_per_second,%.3f\nprocessed_pixels,%.0f\n",
                  report.map, report.map75, report.map50, report.map50_small, report.map50_medium,
                  report.map50_large, report.images_per_second, report.processed_pixels_total);
    out << buf;
    for (const ClassAp& c : report.per_class) {
      std::snprintf(buf, sizeof(buf), "ap_class_%d,%.4f\n", c.class_id, c.ap);
      out << buf;
    }
    return out.str();
  }
  std::snprintf(buf, sizeof(buf),
                "mAP      %.4f\nmAP75    %.4f\nmAP50    %.4f\nmAP50_s  %.4f\nmAP50_m  %.4f\n"
                "mAP50_l  %.4f\nimg/s    %.3f\npixels   %.0f\n",
                report.map, report.map75, report.map50, report.map50_small, report.map50_medium,
                report.map50_large, report.images_per_second, report.processed_pixels_total);
  out << buf;
  if (!report.per_class.empty()) {
    out << "per-class AP (mAP / mAP50):\n";
    for (const ClassAp& c : report.per_class) {
      std::snprintf(buf, sizeof(buf), "  class %-4d %.4f / %.4f\n", c.class_id, c.ap, c.ap50);
      out << buf;
    }
  }
  return out.str();
}

}  // namespace asahi
