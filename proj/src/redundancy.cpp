#include "asahi/redundancy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace asahi {

namespace {

int axis_slice_count(int image_extent, double edge, double mu) {
  // The epsilon absorbs float noise when the stride divides exactly.
  const double ratio = (image_extent - edge * mu) / (edge * (1.0 - mu));
  const int n = static_cast<int>(std::ceil(ratio - 1e-9));
  return std::max(n, 1);
}

double axis_overrun(int image_extent, double edge, double mu, int count) {
  const double designed_span = edge * count - mu * edge * (count - 1);
  return std::max(0.0, designed_span - image_extent);
}

}  // namespace

RedundancyReport analyze(ImageDims dims, double edge_x, double edge_y, double mu) {
  if (edge_x <= 0.0 || edge_y <= 0.0) {
    throw std::invalid_argument("analyze: edge lengths must be positive");
  }
  RedundancyReport report;
  report.slices_x = axis_slice_count(dims.width, edge_x, mu);
  report.slices_y = axis_slice_count(dims.height, edge_y, mu);
  report.redundant_x = axis_overrun(dims.width, edge_x, mu, report.slices_x);
  report.redundant_y = axis_overrun(dims.height, edge_y, mu, report.slices_y);
  report.redundant_area = report.redundant_x * dims.height + report.redundant_y * dims.width -
                          report.redundant_x * report.redundant_y;
  report.image_area = static_cast<double>(dims.pixel_count());
  report.total = report.redundant_area + report.image_area;
  return report;
}

RedundancyReport analyze_plan(const SlicePlan& plan) {
  return analyze(plan.source, plan.window_width, plan.window_height, plan.overlap_ratio);
}

double reduction_rate(const RedundancyReport& adaptive, const RedundancyReport& fixed) {
  if (adaptive.image_area != fixed.image_area) {
    throw std::invalid_argument("reduction_rate: reports describe different images");
  }
  return 1.0 - adaptive.total / fixed.total;
}

std::vector<ReductionRow> reduction_table(const std::vector<ImageDims>& resolutions,
                                          const AsahiConfig& cfg, int fixed_patch) {
  std::vector<ReductionRow> rows;
  rows.reserve(resolutions.size());
  for (const ImageDims& dims : resolutions) {
    ReductionRow row;
    row.dims = dims;
    row.adaptive = analyze_plan(asahi_plan(dims, cfg));
    row.fixed = analyze_plan(fixed_plan(dims, fixed_patch, cfg.overlap_ratio));
    row.reduction = reduction_rate(row.adaptive, row.fixed);
    rows.push_back(row);
  }
  return rows;
}

std::string format_reduction_table(const std::vector<ReductionRow>& rows, bool csv) {
  std::ostringstream out;
  char buf[256];
  if (csv) {
    out << "width,height,grid_x,grid_y,sr_adaptive,total_adaptive,sr_fixed,total_fixed,"
           "reduction_pct\n";
    for (const ReductionRow& r : rows) {
      std::snprintf(buf, sizeof(buf), "%d,%d,%d,%d,%.2f,%.2f,%.2f,%.2f,%.2f\n", r.dims.width,
                    r.dims.height, r.adaptive.slices_x, r.adaptive.slices_y,
                    r.adaptive.redundant_area, r.adaptive.total, r.fixed.redundant_area,
                    r.fixed.total, 100.0 * r.reduction);
      out << buf;
    }
    return out.str();
  }
  std::snprintf(buf, sizeof(buf), "%-12s %-6s %16s %16s %16s %16s %10s\n", "resolution", "grid",
                "Sr adaptive", "total adaptive", "Sr fixed", "total fixed", "reduction");
  out << buf;
  for (const ReductionRow& r : rows) {
    const std::string dims = std::to_string(r.dims.width) + "x" + std::to_string(r.dims.height);
    const std::string grid =
        std::to_string(r.adaptive.slices_x) + "x" + std::to_string(r.adaptive.slices_y);
    std::snprintf(buf, sizeof(buf), "%-12s %-6s %16.2f %16.2f %16.2f %16.2f %9.2f%%\n",
                  dims.c_str(), grid.c_str(), r.adaptive.redundant_area, r.adaptive.total,
                  r.fixed.redundant_area, r.fixed.total, 100.0 * r.reduction);
    out << buf;
  }
  return out.str();
}

}  // namespace asahi
