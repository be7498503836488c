#include "asahi/nms.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "asahi/rng.hpp"

namespace asahi {
namespace {

SuppressionConfig iou_config(double threshold = 0.5, bool class_aware = true) {
  return {OverlapMetric::Iou, threshold, class_aware};
}

Detection det(double score, double x1, double y1, double x2, double y2, int class_id = 0) {
  return Detection(class_id, score, BBox(x1, y1, x2, y2));
}

bool same_detections(const std::vector<Detection>& a, const std::vector<Detection>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].class_id != b[i].class_id || a[i].score != b[i].score || !(a[i].box == b[i].box)) {
      return false;
    }
  }
  return true;
}

std::vector<Detection> random_instance(SplitMix64& rng, int max_boxes, int classes) {
  const int n = static_cast<int>(rng.next() % static_cast<std::uint64_t>(max_boxes + 1));
  std::vector<Detection> dets;
  dets.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double x = rng.uniform(0, 400);
    const double y = rng.uniform(0, 400);
    const double w = rng.uniform(4, 80);
    const double h = rng.uniform(4, 80);
    dets.push_back(Detection(static_cast<int>(rng.next() % static_cast<std::uint64_t>(classes)),
                             rng.uniform(0.01, 1.0), BBox(x, y, x + w, y + h)));
  }
  return dets;
}

TEST(GreedyTest, EmptyInput) {
  EXPECT_TRUE(greedy_suppress({}, iou_config()).empty());
}

TEST(GreedyTest, DuplicateSuppressedDisjointKept) {
  const auto kept = greedy_suppress(
      {det(0.9, 0, 0, 10, 10), det(0.8, 0, 0, 10, 10)}, iou_config(0.5));
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_DOUBLE_EQ(kept[0].score, 0.9);

  const auto both = greedy_suppress(
      {det(0.9, 0, 0, 10, 10), det(0.8, 50, 50, 60, 60)}, iou_config(0.5));
  EXPECT_EQ(both.size(), 2u);
}

TEST(GreedyTest, StrictThresholdComparison) {
  // IoU exactly at the threshold does not suppress.
  const BBox a(0, 0, 10, 10), b(5, 0, 15, 10);
  const double v = iou(a, b);
  const auto kept = greedy_suppress(
      {Detection(0, 0.9, a), Detection(0, 0.8, b)}, iou_config(v));
  EXPECT_EQ(kept.size(), 2u);
}

TEST(GreedyTest, InvalidThresholdThrows) {
  EXPECT_THROW(greedy_suppress({}, iou_config(-1.0)), std::invalid_argument);
  EXPECT_THROW(greedy_suppress({}, iou_config(1.5)), std::invalid_argument);
}

TEST(ClusterTest, NoPairAboveThresholdIsIdentity) {
  const std::vector<Detection> dets = {det(0.9, 0, 0, 10, 10), det(0.8, 50, 0, 60, 10),
                                       det(0.7, 0, 50, 10, 60)};
  const ClusterResult result = cluster_suppress_stats(dets, iou_config(0.5));
  EXPECT_EQ(result.kept.size(), 3u);
  EXPECT_LE(result.iterations, 3);
}

TEST(ClusterTest, SuppressionRevocationChain) {
  // A overlaps B, B overlaps C, A does not reach C. Greedy keeps {A, C}:
  // B dies to A, so B's claim on C is revoked.
  const Detection a = det(0.9, 0, 0, 10, 10);
  const Detection b = det(0.8, 4, 0, 14, 10);    // iou(a,b) = 6/14 > 0.3
  const Detection c = det(0.7, 8, 0, 18, 10);    // iou(b,c) = 6/14, iou(a,c) = 2/18
  const std::vector<Detection> dets = {a, b, c};
  const SuppressionConfig cfg = iou_config(0.3);

  const auto greedy = greedy_suppress(dets, cfg);
  ASSERT_EQ(greedy.size(), 2u);
  EXPECT_DOUBLE_EQ(greedy[0].score, 0.9);
  EXPECT_DOUBLE_EQ(greedy[1].score, 0.7);

  const auto cluster = cluster_suppress(dets, cfg);
  EXPECT_TRUE(same_detections(greedy, cluster));
}

TEST(ClusterTest, GreedyEquivalenceSweep) {
  SplitMix64 rng(777);
  const OverlapMetric metrics[] = {OverlapMetric::Iou, OverlapMetric::Giou, OverlapMetric::Diou,
                                   OverlapMetric::Ciou};
  const double thresholds[] = {0.3, 0.5, 0.7};
  for (int trial = 0; trial < 300; ++trial) {
    const std::vector<Detection> dets = random_instance(rng, 120, 4);
    SuppressionConfig cfg;
    cfg.metric = metrics[trial % 4];
    cfg.threshold = thresholds[trial % 3];
    cfg.class_aware = trial % 2 == 0;
    const auto greedy = greedy_suppress(dets, cfg);
    const ClusterResult cluster = cluster_suppress_stats(dets, cfg);
    ASSERT_TRUE(same_detections(greedy, cluster.kept)) << "trial " << trial;
    if (!dets.empty()) {
      ASSERT_LE(cluster.iterations, static_cast<int>(dets.size()));
    }
  }
}

TEST(ClusterTest, NegativeThresholdsStayGreedyEquivalent) {
  // GIoU/DIoU admit negative thresholds; suppressed rows must not shadow
  // later detections through their zeroed matrix entries.
  SplitMix64 rng(90125);
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<Detection> dets = random_instance(rng, 40, 2);
    SuppressionConfig cfg;
    cfg.metric = trial % 2 == 0 ? OverlapMetric::Giou : OverlapMetric::Diou;
    cfg.threshold = -0.25;
    ASSERT_TRUE(same_detections(greedy_suppress(dets, cfg), cluster_suppress(dets, cfg)));
  }
}

TEST(CdnTest, DuplicatesSuppressedDisjointKept) {
  const auto kept = cdn({det(0.9, 0, 0, 10, 10), det(0.8, 0, 0, 10, 10)});
  ASSERT_EQ(kept.size(), 1u);
  const auto disjoint =
      cdn({det(0.9, 0, 0, 10, 10), det(0.8, 50, 50, 60, 60), det(0.7, 90, 0, 99, 10)});
  EXPECT_EQ(disjoint.size(), 3u);
}

TEST(CdnTest, CenterDistanceRescuesCrowdedNeighbors) {
  // Tall thin boxes offset along the long axis: IoU above 0.5 (plain NMS
  // suppresses) while the center-distance penalty pushes DIoU below 0.5
  // (CDN keeps both). IoU 0.6 cannot coexist with DIoU 0.45: for any pair,
  // the penalty is at most (1-IoU)^2/4, so IoU 0.6 forces DIoU >= 0.56. The
  // fixture uses the achievable regime instead.
  const BBox first(0, 0, 51.32, 100.0);
  const BBox second(0, 31.58, 51.32, 131.58);
  ASSERT_GT(iou(first, second), 0.5);
  ASSERT_NEAR(iou(first, second), 0.52, 0.005);
  ASSERT_LT(diou(first, second), 0.5);
  ASSERT_NEAR(diou(first, second), 0.47, 0.005);

  const std::vector<Detection> dets = {Detection(0, 0.9, first), Detection(0, 0.8, second)};
  EXPECT_EQ(cdn(dets).size(), 2u);
  EXPECT_EQ(greedy_suppress(dets, iou_config(0.5)).size(), 1u);
}

TEST(CdnTest, PenaltyBoundHoldsOnRandomPairs) {
  // Past IoU 0.6 the center-distance penalty can no longer drag DIoU under
  // 0.5: documents why the crowded fixture above must live near IoU ~0.52.
  SplitMix64 rng(1234);
  int checked = 0;
  for (int trial = 0; trial < 50000; ++trial) {
    const double x = rng.uniform(0, 100), y = rng.uniform(0, 100);
    const BBox a(x, y, x + rng.uniform(1, 100), y + rng.uniform(1, 100));
    const double dx = rng.uniform(-30, 30), dy = rng.uniform(-30, 30);
    const BBox b(a.x1() + dx, a.y1() + dy, a.x2() + dx + rng.uniform(-0.5, 20),
                 a.y2() + dy + rng.uniform(-0.5, 20));
    if (iou(a, b) < 0.6) continue;
    ++checked;
    ASSERT_GT(diou(a, b), 0.5);
  }
  EXPECT_GT(checked, 1000);
}

TEST(SoftTest, DisjointUnchangedAndGaussianDecay) {
  const auto unchanged =
      soft_suppress({det(0.9, 0, 0, 10, 10), det(0.8, 50, 50, 60, 60)}, 0.5);
  ASSERT_EQ(unchanged.size(), 2u);
  EXPECT_DOUBLE_EQ(unchanged[0].score, 0.9);
  EXPECT_DOUBLE_EQ(unchanged[1].score, 0.8);

  // Identical boxes: second decays to 0.8 * exp(-1/0.5) = 0.8 * exp(-2).
  const auto decayed =
      soft_suppress({det(0.9, 0, 0, 10, 10), det(0.8, 0, 0, 10, 10)}, 0.5);
  ASSERT_EQ(decayed.size(), 2u);
  EXPECT_NEAR(decayed[1].score, 0.8 * std::exp(-2.0), 1e-12);

  const auto single = soft_suppress({det(0.4, 0, 0, 5, 5)}, 0.5);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_DOUBLE_EQ(single[0].score, 0.4);
}

TEST(SoftTest, FloorDropsCollapsedScores) {
  const auto kept = soft_suppress({det(0.9, 0, 0, 10, 10), det(0.8, 0, 0, 10, 10)}, 0.5, 0.2);
  EXPECT_EQ(kept.size(), 1u);
  EXPECT_THROW(soft_suppress({}, 0.0), std::invalid_argument);
}

TEST(WbfTest, SingleAndIdenticalBoxes) {
  const auto self = wbf({det(0.7, 0, 0, 10, 10)}, 0.4);
  ASSERT_EQ(self.size(), 1u);
  EXPECT_EQ(self[0].box, BBox(0, 0, 10, 10));

  const auto fused = wbf({det(0.6, 0, 0, 10, 10), det(0.8, 0, 0, 10, 10)}, 0.4);
  ASSERT_EQ(fused.size(), 1u);
  EXPECT_EQ(fused[0].box, BBox(0, 0, 10, 10));
  EXPECT_NEAR(fused[0].score, 0.7, 1e-12);
}

TEST(WbfTest, EqualWeightMeanCoordinates) {
  // iou = 100/200 = 0.5 > 0.4, equal scores: plain coordinate mean.
  const auto fused = wbf({det(1.0, 0, 0, 10, 10), det(1.0, 0, 0, 20, 10)}, 0.4);
  ASSERT_EQ(fused.size(), 1u);
  EXPECT_NEAR(fused[0].box.x2(), 15.0, 1e-9);
  EXPECT_NEAR(fused[0].box.y2(), 10.0, 1e-9);
  EXPECT_NEAR(fused[0].score, 1.0, 1e-12);
}

TEST(WbfTest, ClassesNeverFuse) {
  const auto fused = wbf({det(0.9, 0, 0, 10, 10, 1), det(0.8, 0, 0, 10, 10, 2)}, 0.4);
  EXPECT_EQ(fused.size(), 2u);
}

TEST(SuppressionProperty, Idempotence) {
  SplitMix64 rng(31415);
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<Detection> dets = random_instance(rng, 60, 3);
    const SuppressionConfig cfg{OverlapMetric::Diou, 0.5, true};
    const auto once = cluster_suppress(dets, cfg);
    ASSERT_TRUE(same_detections(once, cluster_suppress(once, cfg)));
    const auto greedy_once = greedy_suppress(dets, cfg);
    ASSERT_TRUE(same_detections(greedy_once, greedy_suppress(greedy_once, cfg)));
  }
  // Soft suppression and fusion re-touch surviving overlaps, so exact
  // idempotence only holds once the output is overlap-free.
  const std::vector<Detection> disjoint = {det(0.9, 0, 0, 10, 10), det(0.8, 50, 50, 60, 60)};
  ASSERT_TRUE(same_detections(soft_suppress(disjoint, 0.5),
                              soft_suppress(soft_suppress(disjoint, 0.5), 0.5)));
  const auto wbf_once = wbf({det(0.9, 0, 0, 10, 10), det(0.8, 1, 0, 11, 10)}, 0.4);
  ASSERT_TRUE(same_detections(wbf_once, wbf(wbf_once, 0.4)));
}

TEST(SuppressionProperty, ScoreOrderAndStableTies) {
  const std::vector<Detection> dets = {det(0.5, 0, 0, 10, 10, 0), det(0.5, 100, 0, 110, 10, 0),
                                       det(0.9, 200, 0, 210, 10, 0)};
  const auto kept = greedy_suppress(dets, iou_config(0.5));
  ASSERT_EQ(kept.size(), 3u);
  EXPECT_DOUBLE_EQ(kept[0].score, 0.9);
  // Tie broken by input order.
  EXPECT_EQ(kept[1].box, BBox(0, 0, 10, 10));
  EXPECT_EQ(kept[2].box, BBox(100, 0, 110, 10));
}

TEST(SuppressionProperty, ClassIsolation) {
  const std::vector<Detection> dets = {det(0.9, 0, 0, 10, 10, 1), det(0.8, 0, 0, 10, 10, 2),
                                       det(0.7, 0, 0, 10, 10, 3)};
  EXPECT_EQ(greedy_suppress(dets, iou_config(0.5, true)).size(), 3u);
  EXPECT_EQ(cluster_suppress(dets, iou_config(0.5, true)).size(), 3u);
  EXPECT_EQ(greedy_suppress(dets, iou_config(0.5, false)).size(), 1u);
}

}  // namespace
}  // namespace asahi
