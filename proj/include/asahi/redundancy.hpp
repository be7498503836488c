#pragma once

#include <string>
#include <vector>

#include "asahi/geom.hpp"
#include "asahi/slicing.hpp"

namespace asahi {

/// Redundant-area accounting for one slice plan. Rx/Ry measure how far the
/// designed grid span exceeds the image per axis; whether that overrun is
/// realized as out-of-image padding or as extra overlap after inward
/// clamping, the same excess area is processed either way.
struct RedundancyReport {
  int slices_x = 0;       // a
  int slices_y = 0;       // b
  double redundant_x = 0; // Rx, pixels
  double redundant_y = 0; // Ry, pixels
  double redundant_area = 0;  // Sr, px^2
  double image_area = 0;      // Sa = W*H, px^2
  double total = 0;           // Sr + Sa, px^2

  friend bool operator==(const RedundancyReport&, const RedundancyReport&) = default;
};

/// Closed-form report from per-axis effective edge lengths:
///   a  = ceil((W - ex*mu) / (ex*(1-mu)))        (and b likewise from ey, H)
///   Rx = max(0, ex*a - mu*ex*(a-1) - W)         (Ry likewise)
///   Sr = Rx*H + Ry*W - Rx*Ry
RedundancyReport analyze(ImageDims dims, double edge_x, double edge_y, double mu);

/// Report for a generated plan, using its uniform integer window extents as
/// the effective edges.
RedundancyReport analyze_plan(const SlicePlan& plan);

/// 1 - (total_adaptive / total_fixed). Throws if the reports describe
/// different image areas.
double reduction_rate(const RedundancyReport& adaptive, const RedundancyReport& fixed);

struct ReductionRow {
  ImageDims dims{1, 1};
  RedundancyReport adaptive;
  RedundancyReport fixed;
  double reduction = 0;  // fraction in (-inf, 1)
};

/// One row per resolution: adaptive plan vs the fixed-size baseline.
std::vector<ReductionRow> reduction_table(const std::vector<ImageDims>& resolutions,
                                          const AsahiConfig& cfg, int fixed_patch);

/// Aligned text or comma-separated rendering, values rounded to 2 decimals.
std::string format_reduction_table(const std::vector<ReductionRow>& rows, bool csv);

}  // namespace asahi
