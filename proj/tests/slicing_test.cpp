#include "asahi/slicing.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "asahi/rng.hpp"

namespace asahi {
namespace {

AsahiConfig config(double mu = 0.15, int r = 512, int target = 512) {
  AsahiConfig cfg;
  cfg.overlap_ratio = mu;
  cfg.limiting_dimension = r;
  cfg.resize_target = target;
  return cfg;
}

// Checks that the windows cover every pixel of the image: per axis the
// sorted interval union must be gap-free from 0 to the image extent. The
// grid structure makes the 2-D union the product of the axis unions.
void expect_exact_coverage(const SlicePlan& plan) {
  for (int axis = 0; axis < 2; ++axis) {
    std::set<std::pair<int, int>> intervals;
    for (const SliceWindow& w : plan.windows) {
      intervals.insert(axis == 0 ? std::make_pair(w.x1, w.x2) : std::make_pair(w.y1, w.y2));
    }
    const int extent = axis == 0 ? plan.source.width : plan.source.height;
    int covered_to = 0;
    for (const auto& [lo, hi] : intervals) {
      ASSERT_LE(lo, covered_to) << "gap on axis " << axis;
      covered_to = std::max(covered_to, hi);
    }
    ASSERT_EQ(covered_to, extent) << "axis " << axis << " not covered to the boundary";
    ASSERT_GE(intervals.begin()->first, 0);
  }
}

// Per-pixel counting oracle for small rasters.
void expect_exact_coverage_per_pixel(const SlicePlan& plan) {
  std::vector<int> hits(static_cast<std::size_t>(plan.source.pixel_count()), 0);
  for (const SliceWindow& w : plan.windows) {
    for (int y = w.y1; y < w.y2; ++y) {
      for (int x = w.x1; x < w.x2; ++x) {
        ++hits[static_cast<std::size_t>(y) * plan.source.width + x];
      }
    }
  }
  ASSERT_TRUE(std::all_of(hits.begin(), hits.end(), [](int h) { return h >= 1; }));
}

TEST(ThresholdTest, KnownValues) {
  EXPECT_NEAR(asahi_threshold(config(0.15, 512)), 1818.6, 1e-9);
  EXPECT_EQ(static_cast<int>(asahi_threshold(config(0.15, 512))), 1818);
  EXPECT_DOUBLE_EQ(asahi_threshold(config(0.0, 512)), 2049.0);
  EXPECT_DOUBLE_EQ(asahi_threshold(config(0.5, 100)), 251.0);
}

TEST(ThresholdTest, RejectsBadConfig) {
  EXPECT_THROW(asahi_threshold(config(1.0)), std::invalid_argument);
  EXPECT_THROW(asahi_threshold(config(-0.1)), std::invalid_argument);
  EXPECT_THROW(asahi_threshold(config(0.15, 0)), std::invalid_argument);
}

TEST(AsahiPlanTest, GridSelectionByThreshold) {
  const SlicePlan large = asahi_plan(ImageDims(1920, 1080), config());
  EXPECT_EQ(large.rows, 3);
  EXPECT_EQ(large.cols, 4);
  EXPECT_EQ(large.window_count(), 12u);

  const SlicePlan small = asahi_plan(ImageDims(960, 540), config());
  EXPECT_EQ(small.rows, 2);
  EXPECT_EQ(small.cols, 3);
  EXPECT_EQ(small.window_count(), 6u);

  // The switch happens exactly past trunc(T) on the longer edge.
  EXPECT_EQ(asahi_plan(ImageDims(1818, 1000), config()).window_count(), 6u);
  EXPECT_EQ(asahi_plan(ImageDims(1819, 1000), config()).window_count(), 12u);
  // Portrait images transpose the grid.
  const SlicePlan portrait = asahi_plan(ImageDims(1080, 1920), config());
  EXPECT_EQ(portrait.rows, 4);
  EXPECT_EQ(portrait.cols, 3);
}

TEST(AsahiPlanTest, ZeroOverlapTiling) {
  // 300x200 at mu=0: designed edges 300/3+1 = 101 and 200/2+1 = 101.
  const SlicePlan plan = asahi_plan(ImageDims(300, 200), config(0.0));
  ASSERT_EQ(plan.window_count(), 6u);
  for (const SliceWindow& w : plan.windows) {
    EXPECT_EQ(w.width(), 101);
    EXPECT_EQ(w.height(), 101);
  }
  expect_exact_coverage(plan);
  expect_exact_coverage_per_pixel(plan);
}

TEST(AsahiPlanTest, RecordedScalars) {
  const SlicePlan plan = asahi_plan(ImageDims(960, 540), config());
  EXPECT_NEAR(plan.threshold, 1818.6, 1e-9);
  EXPECT_NEAR(plan.long_edge, 960.0 / 2.7 + 1.0, 1e-9);
  EXPECT_NEAR(plan.short_edge, 540.0 / 1.85 + 1.0, 1e-9);
  EXPECT_NEAR(plan.slice_size, std::max(plan.long_edge, plan.short_edge), 1e-12);
  EXPECT_EQ(plan.window_width, static_cast<int>(plan.long_edge));
  EXPECT_EQ(plan.window_height, static_cast<int>(plan.short_edge));
  EXPECT_EQ(plan.strategy, SliceStrategy::Asahi);
}

TEST(AsahiPlanTest, RowMajorGridIndices) {
  const SlicePlan plan = asahi_plan(ImageDims(1920, 1080), config());
  for (int r = 0; r < plan.rows; ++r) {
    for (int c = 0; c < plan.cols; ++c) {
      const SliceWindow& w = plan.at(r, c);
      EXPECT_EQ(w.row, r);
      EXPECT_EQ(w.col, c);
    }
  }
  EXPECT_EQ(plan.windows[1].col, 1);
  EXPECT_EQ(plan.windows[static_cast<std::size_t>(plan.cols)].row, 1);
}

TEST(AsahiPlanTest, TinyImageDoesNotCrash) {
  const SlicePlan plan = asahi_plan(ImageDims(2, 2), config());
  expect_exact_coverage(plan);
  for (const SliceWindow& w : plan.windows) {
    EXPECT_GE(w.width(), 1);
    EXPECT_GE(w.height(), 1);
    EXPECT_LE(w.x2, 2);
    EXPECT_LE(w.y2, 2);
  }
  // An axis whose designed window cannot fit collapses to one full window.
  const SlicePlan dot = asahi_plan(ImageDims(1, 1), config());
  EXPECT_EQ(dot.window_count(), 1u);
  EXPECT_EQ(dot.windows[0], (SliceWindow{0, 0, 1, 1, 0, 0}));
  const SlicePlan strip = asahi_plan(ImageDims(1, 300), config());
  EXPECT_EQ(strip.cols, 1);
  expect_exact_coverage(strip);
}

TEST(FixedPlanTest, KnownGrids) {
  const SlicePlan p1 = fixed_plan(ImageDims(960, 540), 512, 0.15);
  EXPECT_EQ(p1.cols, 3);  // ceil(883.2/435.2)
  EXPECT_EQ(p1.rows, 2);  // ceil(463.2/435.2)
  EXPECT_EQ(p1.window_count(), 6u);
  for (const SliceWindow& w : p1.windows) {
    EXPECT_EQ(w.width(), 512);
    EXPECT_EQ(w.height(), 512);
  }
  expect_exact_coverage(p1);

  const SlicePlan p2 = fixed_plan(ImageDims(512, 512), 512, 0.15);
  EXPECT_EQ(p2.window_count(), 1u);
  EXPECT_EQ(p2.windows[0], (SliceWindow{0, 0, 512, 512, 0, 0}));

  const SlicePlan p3 = fixed_plan(ImageDims(1920, 1080), 512, 0.15);
  EXPECT_EQ(p3.cols, 5);  // ceil(1843.2/435.2)
  EXPECT_EQ(p3.rows, 3);  // ceil(1003.2/435.2)
  expect_exact_coverage(p3);
}

TEST(FixedPlanTest, RejectsBadPatch) {
  EXPECT_THROW(fixed_plan(ImageDims(100, 100), 0, 0.15), std::invalid_argument);
  EXPECT_THROW(fixed_plan(ImageDims(100, 100), 64, 1.0), std::invalid_argument);
}

TEST(CoverageFuzz, RandomResolutionsAndOverlaps) {
  SplitMix64 rng(424242);
  const double mus[] = {0.0, 0.1, 0.15, 0.3};
  for (int trial = 0; trial < 10000; ++trial) {
    const int w = 64 + static_cast<int>(rng.next() % 4033);
    const int h = 64 + static_cast<int>(rng.next() % 4033);
    const double mu = mus[rng.next() % 4];
    const SlicePlan plan = asahi_plan(ImageDims(w, h), config(mu));

    // 6 or 12 windows, shape {2,3} or {3,4} up to orientation.
    ASSERT_TRUE(plan.window_count() == 6 || plan.window_count() == 12);
    const int lo = std::min(plan.rows, plan.cols), hi = std::max(plan.rows, plan.cols);
    ASSERT_TRUE((lo == 2 && hi == 3) || (lo == 3 && hi == 4));
    const bool six = ImageDims(w, h).long_edge() <= static_cast<int>(asahi_threshold(config(mu)));
    ASSERT_EQ(plan.window_count(), six ? 6u : 12u);

    expect_exact_coverage(plan);

    // Interior neighbor overlap within 2 px of the designed mu * edge; the
    // last window in each axis may only overlap more (it shifts inward).
    for (int r = 0; r < plan.rows; ++r) {
      for (int c = 0; c + 1 < plan.cols; ++c) {
        const double got = plan.at(r, c).x2 - plan.at(r, c + 1).x1;
        const double designed = mu * plan.window_width;
        if (c + 1 < plan.cols - 1) {
          ASSERT_NEAR(got, designed, 2.0001) << w << "x" << h << " mu=" << mu;
        } else {
          ASSERT_GE(got, std::floor(designed) - 2.0);
        }
      }
    }
    for (int c = 0; c < plan.cols; ++c) {
      for (int r = 0; r + 1 < plan.rows; ++r) {
        const double got = plan.at(r, c).y2 - plan.at(r + 1, c).y1;
        const double designed = mu * plan.window_height;
        if (r + 1 < plan.rows - 1) {
          ASSERT_NEAR(got, designed, 2.0001) << w << "x" << h << " mu=" << mu;
        } else {
          ASSERT_GE(got, std::floor(designed) - 2.0);
        }
      }
    }

    for (const SliceWindow& win : plan.windows) {
      ASSERT_LE(win.width(), plan.window_width);
      ASSERT_LE(win.height(), plan.window_height);
      ASSERT_GE(win.width(), plan.window_width - 1);
      ASSERT_GE(win.height(), plan.window_height - 1);
    }
  }
}

TEST(PlanProperty, Determinism) {
  const SlicePlan a = asahi_plan(ImageDims(1477, 983), config(0.15));
  const SlicePlan b = asahi_plan(ImageDims(1477, 983), config(0.15));
  EXPECT_EQ(a, b);
  EXPECT_EQ(format_plan_windows(a), format_plan_windows(b));
}

TEST(PlanProperty, ProcessedPixelsMonotoneInOverlap) {
  SplitMix64 rng(5150);
  for (int trial = 0; trial < 500; ++trial) {
    const int w = 200 + static_cast<int>(rng.next() % 3000);
    const int h = 200 + static_cast<int>(rng.next() % 3000);
    const double mu1 = rng.uniform(0.0, 0.45);
    const double mu2 = mu1 + rng.uniform(0.01, 0.45);
    const SlicePlan a = grid_plan(ImageDims(w, h), 4, 3, mu1);
    const SlicePlan b = grid_plan(ImageDims(w, h), 4, 3, mu2);
    ASSERT_LE(a.processed_pixels(), b.processed_pixels()) << w << "x" << h;
  }
}

TEST(GridPlanTest, FixedCountGrids) {
  for (const auto& [count_long, count_short, expect] :
       {std::tuple{2, 2, 4}, {3, 2, 6}, {4, 3, 12}, {5, 3, 15}}) {
    const SlicePlan plan = grid_plan(ImageDims(1920, 1080), count_long, count_short, 0.15);
    EXPECT_EQ(static_cast<int>(plan.window_count()), expect);
    expect_exact_coverage(plan);
  }
}

TEST(ExtractPatchTest, IdentityAndConstantColor) {
  Raster image(600, 600);
  for (int y = 0; y < 600; ++y) {
    for (int x = 0; x < 600; ++x) {
      image.at(x, y, 0) = 120;
      image.at(x, y, 1) = 40;
      image.at(x, y, 2) = 200;
    }
  }
  const SliceWindow identity{0, 0, 512, 512, 0, 0};
  const PatchResult same = extract_patch(image, identity, 512);
  EXPECT_EQ(same.patch.width, 512);
  EXPECT_EQ(same.patch.height, 512);
  EXPECT_DOUBLE_EQ(same.scale_x, 1.0);
  EXPECT_DOUBLE_EQ(same.scale_y, 1.0);
  EXPECT_EQ(same.patch.at(17, 400, 2), 200);

  // Downscale of a constant image stays constant (bilinear preserves it).
  Raster big(1100, 1100);
  std::fill(big.data.begin(), big.data.end(), 77);
  const PatchResult down = extract_patch(big, {0, 0, 1024, 1024, 0, 0}, 512);
  EXPECT_EQ(down.patch.width, 512);
  EXPECT_EQ(down.patch.height, 512);
  EXPECT_TRUE(std::all_of(down.patch.data.begin(), down.patch.data.end(),
                          [](std::uint8_t v) { return v == 77; }));
}

TEST(ExtractPatchTest, AspectPreservingScale) {
  Raster image(700, 400);
  const PatchResult result = extract_patch(image, {0, 0, 640, 360, 0, 0}, 512);
  EXPECT_EQ(result.patch.width, 512);
  EXPECT_EQ(result.patch.height, 288);
  EXPECT_DOUBLE_EQ(result.scale_x, 0.8);
  EXPECT_DOUBLE_EQ(result.scale_y, 0.8);
}

TEST(ExtractPatchTest, WindowOutOfBoundsThrows) {
  Raster image(100, 100);
  EXPECT_THROW(extract_patch(image, {50, 50, 150, 150, 0, 0}, 64), std::invalid_argument);
  EXPECT_THROW(extract_patch(image, {-1, 0, 50, 50, 0, 0}, 64), std::invalid_argument);
}

TEST(ExtractPatchTest, CoordinateRoundTripWithinHalfPixel) {
  SplitMix64 rng(31337);
  Raster image(800, 600);
  for (int trial = 0; trial < 200; ++trial) {
    const int x1 = static_cast<int>(rng.next() % 500);
    const int y1 = static_cast<int>(rng.next() % 400);
    const int w = 32 + static_cast<int>(rng.next() % 300);
    const int h = 32 + static_cast<int>(rng.next() % 200);
    const SliceWindow win{x1, y1, std::min(x1 + w, 800), std::min(y1 + h, 600), 0, 0};
    const PatchResult patch = extract_patch(image, win, 256);
    // A source point mapped into the patch and back lands within 0.5 px.
    const double sx = rng.uniform(win.x1, win.x2);
    const double sy = rng.uniform(win.y1, win.y2);
    const double px = (sx - win.x1) * patch.scale_x;
    const double py = (sy - win.y1) * patch.scale_y;
    ASSERT_NEAR(px / patch.scale_x + win.x1, sx, 0.5);
    ASSERT_NEAR(py / patch.scale_y + win.y1, sy, 0.5);
    ASSERT_GE(px, 0.0);
    ASSERT_LE(px, patch.patch.width + 1e-9);
  }
}

TEST(FormatPlanTest, LineOrientedWindows) {
  const SlicePlan plan = asahi_plan(ImageDims(300, 200), config(0.0));
  const std::string text = format_plan_windows(plan);
  EXPECT_EQ(text.substr(0, text.find('\n')), "0 0 0 0 101 101");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 6);
}

}  // namespace
}  // namespace asahi
