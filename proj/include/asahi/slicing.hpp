#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "asahi/geom.hpp"
#include "asahi/raster.hpp"

namespace asahi {

/// Parameters of the adaptive slicer: overlap ratio mu in [0,1), limiting
/// dimension r (pixels), and the uniform detector input size patches are
/// resized to.
struct AsahiConfig {
  double overlap_ratio = 0.15;
  int limiting_dimension = 512;
  int resize_target = 512;

  void validate() const;
};

/// One slice window: integer pixel rectangle fully inside the source image,
/// plus its grid position.
struct SliceWindow {
  int x1 = 0, y1 = 0, x2 = 0, y2 = 0;
  int row = 0, col = 0;

  int width() const { return x2 - x1; }
  int height() const { return y2 - y1; }
  BBox rect() const { return BBox(x1, y1, x2, y2); }

  friend bool operator==(const SliceWindow&, const SliceWindow&) = default;
};

enum class SliceStrategy { Asahi, Fixed };

/// A slice grid over one image together with every scalar that produced it.
/// Windows are row-major and share a uniform integer extent per axis, so the
/// closed-form redundancy accounting and the window list agree exactly.
struct SlicePlan {
  ImageDims source{1, 1};
  int rows = 0;
  int cols = 0;
  std::vector<SliceWindow> windows;

  double overlap_ratio = 0.0;
  double threshold = 0.0;   // T; authoritative for the 6-vs-12 split (Asahi only)
  double slice_size = 0.0;  // p, recorded scalar: max of the two edge candidates
  double long_edge = 0.0;   // designed real edge along the image's longer axis
  double short_edge = 0.0;  // designed real edge along the shorter axis
  SliceStrategy strategy = SliceStrategy::Asahi;

  int window_width = 0;   // uniform integer extent of every window, x axis
  int window_height = 0;  // uniform integer extent, y axis

  std::size_t window_count() const { return windows.size(); }
  const SliceWindow& at(int row, int col) const { return windows[static_cast<std::size_t>(row) * cols + col]; }

  /// Sum of window areas, counting overlap regions once per window.
  std::int64_t processed_pixels() const;

  friend bool operator==(const SlicePlan&, const SlicePlan&) = default;
};

/// T = r * (4 - 3*mu) + 1. Images whose longer edge does not exceed
/// trunc(T) get 6 slices, larger ones get 12.
double asahi_threshold(const AsahiConfig& cfg);

/// Adaptive plan: 2x3 or 3x4 windows (transposed for portrait images), with
/// designed edge L/(k - (k-1)*mu) + 1 per axis and stride edge*(1-mu).
SlicePlan asahi_plan(ImageDims dims, const AsahiConfig& cfg);

/// Same layout rule with an explicit slice count per axis; count_long tiles
/// the image's longer axis. Used for the fixed-count comparison grids.
SlicePlan grid_plan(ImageDims dims, int count_long, int count_short, double mu);

/// Fixed-size baseline: patch x patch windows at stride patch*(1-mu);
/// ceil((L - patch*mu)/(patch*(1-mu))) windows per axis, the last one
/// shifted inward to end at the image boundary.
SlicePlan fixed_plan(ImageDims dims, int patch, double mu);

struct PatchResult {
  Raster patch;
  double scale_x = 1.0;  // patch pixels per source pixel
  double scale_y = 1.0;
};

/// Output dimensions of a w x h window resized so its longer side equals
/// target, aspect ratio preserved, both sides at least 1.
struct PatchDims {
  int width;
  int height;
};
PatchDims patch_output_dims(int w, int h, int target);

/// Crops the window and resamples it with half-pixel-center bilinear
/// interpolation (edge clamp) so the longer side equals target. The returned
/// scales invert the mapping exactly: source = patch / scale + window origin.
PatchResult extract_patch(const Raster& image, const SliceWindow& window, int target);

/// Line-oriented plan report: one window per line, "row col x1 y1 x2 y2".
std::string format_plan_windows(const SlicePlan& plan);

}  // namespace asahi
