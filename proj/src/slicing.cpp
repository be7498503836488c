#include "asahi/slicing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace asahi {

namespace {

struct AxisLayout {
  int extent = 0;           // uniform integer window extent
  std::vector<int> starts;  // ascending, clamped inside [0, image_extent - extent]
};

// Places `count` windows of designed real extent `edge` at stride
// edge*(1-mu). Start positions are truncated to integers, capped so
// consecutive windows can never leave a gap, and shifted inward at the
// image boundary. Collapses to a single full-axis window when the designed
// extent does not fit.
AxisLayout layout_axis(int image_extent, int count, double edge, double mu) {
  AxisLayout layout;
  int extent = static_cast<int>(edge);  // truncation convention, matches the threshold
  extent = std::max(extent, 1);
  if (extent >= image_extent) {
    layout.extent = image_extent;
    layout.starts = {0};
    return layout;
  }
  layout.extent = extent;
  const double stride = edge * (1.0 - mu);
  layout.starts.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    int start = static_cast<int>(j * stride);
    if (j > 0) start = std::min(start, layout.starts.back() + extent);  // no gaps
    start = std::min(start, image_extent - extent);                     // stay inside
    start = std::max(start, layout.starts.empty() ? 0 : layout.starts.back());
    layout.starts.push_back(start);
  }
  return layout;
}

SlicePlan assemble(ImageDims dims, const AxisLayout& x_axis, const AxisLayout& y_axis) {
  SlicePlan plan;
  plan.source = dims;
  plan.cols = static_cast<int>(x_axis.starts.size());
  plan.rows = static_cast<int>(y_axis.starts.size());
  plan.window_width = x_axis.extent;
  plan.window_height = y_axis.extent;
  plan.windows.reserve(static_cast<std::size_t>(plan.rows) * plan.cols);
  for (int r = 0; r < plan.rows; ++r) {
    for (int c = 0; c < plan.cols; ++c) {
      SliceWindow w;
      w.x1 = x_axis.starts[static_cast<std::size_t>(c)];
      w.y1 = y_axis.starts[static_cast<std::size_t>(r)];
      w.x2 = w.x1 + x_axis.extent;
      w.y2 = w.y1 + y_axis.extent;
      w.row = r;
      w.col = c;
      plan.windows.push_back(w);
    }
  }
  return plan;
}

double designed_edge(int image_extent, int count, double mu) {
  return image_extent / (count - (count - 1) * mu) + 1.0;
}

double clamped_sample(const Raster& img, int x, int y, int c, const SliceWindow& win) {
  x = std::clamp(x, win.x1, win.x2 - 1);
  y = std::clamp(y, win.y1, win.y2 - 1);
  return img.at(x, y, c);
}

}  // namespace

void AsahiConfig::validate() const {
  if (!(overlap_ratio >= 0.0 && overlap_ratio < 1.0)) {
    throw std::invalid_argument("AsahiConfig: overlap ratio must be in [0,1)");
  }
  if (limiting_dimension < 1) {
    throw std::invalid_argument("AsahiConfig: limiting dimension must be positive");
  }
  if (resize_target < 1) {
    throw std::invalid_argument("AsahiConfig: resize target must be positive");
  }
}

std::int64_t SlicePlan::processed_pixels() const {
  std::int64_t total = 0;
  for (const SliceWindow& w : windows) {
    total += static_cast<std::int64_t>(w.width()) * w.height();
  }
  return total;
}

double asahi_threshold(const AsahiConfig& cfg) {
  cfg.validate();
  return cfg.limiting_dimension * (4.0 - 3.0 * cfg.overlap_ratio) + 1.0;
}

SlicePlan grid_plan(ImageDims dims, int count_long, int count_short, double mu) {
  if (count_long < 1 || count_short < 1) {
    throw std::invalid_argument("grid_plan: slice counts must be positive");
  }
  if (!(mu >= 0.0 && mu < 1.0)) {
    throw std::invalid_argument("grid_plan: overlap ratio must be in [0,1)");
  }
  const bool portrait = dims.height > dims.width;
  const int count_x = portrait ? count_short : count_long;
  const int count_y = portrait ? count_long : count_short;

  const double edge_long = designed_edge(dims.long_edge(), count_long, mu);
  const double edge_short = designed_edge(dims.short_edge(), count_short, mu);
  const double edge_x = portrait ? edge_short : edge_long;
  const double edge_y = portrait ? edge_long : edge_short;
  if (static_cast<int>(edge_x) < 1 || static_cast<int>(edge_y) < 1) {
    throw std::invalid_argument("grid_plan: window smaller than one pixel");
  }

  SlicePlan plan = assemble(dims, layout_axis(dims.width, count_x, edge_x, mu),
                            layout_axis(dims.height, count_y, edge_y, mu));
  plan.overlap_ratio = mu;
  plan.slice_size = std::max(edge_long, edge_short);
  plan.long_edge = edge_long;
  plan.short_edge = edge_short;
  plan.strategy = SliceStrategy::Asahi;
  return plan;
}

SlicePlan asahi_plan(ImageDims dims, const AsahiConfig& cfg) {
  const double threshold = asahi_threshold(cfg);
  const bool six = dims.long_edge() <= static_cast<long long>(threshold);
  SlicePlan plan = six ? grid_plan(dims, 3, 2, cfg.overlap_ratio)
                       : grid_plan(dims, 4, 3, cfg.overlap_ratio);
  plan.threshold = threshold;
  return plan;
}

SlicePlan fixed_plan(ImageDims dims, int patch, double mu) {
  if (patch < 1) throw std::invalid_argument("fixed_plan: patch size must be positive");
  if (!(mu >= 0.0 && mu < 1.0)) {
    throw std::invalid_argument("fixed_plan: overlap ratio must be in [0,1)");
  }
  const double p = patch;
  const auto axis_count = [&](int extent) {
    // The epsilon absorbs float noise when the stride divides exactly.
    const double ratio = (extent - p * mu) / (p * (1.0 - mu));
    const int n = static_cast<int>(std::ceil(ratio - 1e-9));
    return std::max(n, 1);
  };
  const int cols = axis_count(dims.width);
  const int rows = axis_count(dims.height);

  SlicePlan plan = assemble(dims, layout_axis(dims.width, cols, p, mu),
                            layout_axis(dims.height, rows, p, mu));
  plan.overlap_ratio = mu;
  plan.slice_size = p;
  plan.long_edge = p;
  plan.short_edge = p;
  plan.strategy = SliceStrategy::Fixed;
  return plan;
}

PatchDims patch_output_dims(int w, int h, int target) {
  if (target < 1) throw std::invalid_argument("patch_output_dims: target must be positive");
  if (w < 1 || h < 1) throw std::invalid_argument("patch_output_dims: empty window");
  const int longer = std::max(w, h);
  const double scale = static_cast<double>(target) / longer;
  const int out_w = w >= h ? target : std::max(1, static_cast<int>(std::lround(w * scale)));
  const int out_h = h > w ? target : std::max(1, static_cast<int>(std::lround(h * scale)));
  return {out_w, out_h};
}

PatchResult extract_patch(const Raster& image, const SliceWindow& window, int target) {
  if (window.x1 < 0 || window.y1 < 0 || window.x2 > image.width || window.y2 > image.height ||
      window.width() < 1 || window.height() < 1) {
    throw std::invalid_argument("extract_patch: window out of image bounds");
  }
  const PatchDims out = patch_output_dims(window.width(), window.height(), target);
  const double scale_x = static_cast<double>(out.width) / window.width();
  const double scale_y = static_cast<double>(out.height) / window.height();

  PatchResult result;
  result.patch = Raster(out.width, out.height);
  result.scale_x = scale_x;
  result.scale_y = scale_y;
  for (int y = 0; y < out.height; ++y) {
    // Half-pixel-center sampling: output center maps to source center.
    const double sy = (y + 0.5) / scale_y - 0.5 + window.y1;
    const int y0 = static_cast<int>(std::floor(sy));
    const double fy = sy - y0;
    for (int x = 0; x < out.width; ++x) {
      const double sx = (x + 0.5) / scale_x - 0.5 + window.x1;
      const int x0 = static_cast<int>(std::floor(sx));
      const double fx = sx - x0;
      for (int c = 0; c < 3; ++c) {
        const double top = clamped_sample(image, x0, y0, c, window) * (1.0 - fx) +
                           clamped_sample(image, x0 + 1, y0, c, window) * fx;
        const double bottom = clamped_sample(image, x0, y0 + 1, c, window) * (1.0 - fx) +
                              clamped_sample(image, x0 + 1, y0 + 1, c, window) * fx;
        const double value = top * (1.0 - fy) + bottom * fy;
        result.patch.at(x, y, c) = static_cast<std::uint8_t>(std::lround(std::clamp(value, 0.0, 255.0)));
      }
    }
  }
  return result;
}

std::string format_plan_windows(const SlicePlan& plan) {
  std::ostringstream out;
  for (const SliceWindow& w : plan.windows) {
    out << w.row << ' ' << w.col << ' ' << w.x1 << ' ' << w.y1 << ' ' << w.x2 << ' ' << w.y2
        << '\n';
  }
  return out.str();
}

}  // namespace asahi
