#include "asahi/geom.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace asahi {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string coords_str(double x1, double y1, double x2, double y2) {
  return "(" + std::to_string(x1) + ", " + std::to_string(y1) + ", " + std::to_string(x2) +
         ", " + std::to_string(y2) + ")";
}

}  // namespace

BBox::BBox(double x1, double y1, double x2, double y2) : x1_(x1), y1_(y1), x2_(x2), y2_(y2) {
  if (!(std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) && std::isfinite(y2))) {
    throw std::invalid_argument("BBox: non-finite coordinates " + coords_str(x1, y1, x2, y2));
  }
  if (!(x2 > x1 && y2 > y1)) {
    throw std::invalid_argument("BBox: degenerate box " + coords_str(x1, y1, x2, y2));
  }
}

ImageDims::ImageDims(int w, int h) : width(w), height(h) {
  if (w < 1 || h < 1) {
    throw std::invalid_argument("ImageDims: dimensions must be at least 1x1, got " +
                                std::to_string(w) + "x" + std::to_string(h));
  }
}

double area(const BBox& b) { return b.width() * b.height(); }

double intersection_area(const BBox& a, const BBox& b) {
  const double iw = std::min(a.x2(), b.x2()) - std::max(a.x1(), b.x1());
  const double ih = std::min(a.y2(), b.y2()) - std::max(a.y1(), b.y1());
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  return iw * ih;
}

double iou(const BBox& a, const BBox& b) {
  const double inter = intersection_area(a, b);
  if (inter <= 0.0) return 0.0;
  return inter / (area(a) + area(b) - inter);
}

double giou(const BBox& a, const BBox& b) {
  const double inter = intersection_area(a, b);
  const double uni = area(a) + area(b) - inter;
  const double ew = std::max(a.x2(), b.x2()) - std::min(a.x1(), b.x1());
  const double eh = std::max(a.y2(), b.y2()) - std::min(a.y1(), b.y1());
  const double enclosing = ew * eh;
  return inter / uni - (enclosing - uni) / enclosing;
}

double diou(const BBox& a, const BBox& b) {
  const double dx = a.center_x() - b.center_x();
  const double dy = a.center_y() - b.center_y();
  const double rho2 = dx * dx + dy * dy;
  const double ew = std::max(a.x2(), b.x2()) - std::min(a.x1(), b.x1());
  const double eh = std::max(a.y2(), b.y2()) - std::min(a.y1(), b.y1());
  const double c2 = ew * ew + eh * eh;  // > 0 for non-degenerate boxes
  return iou(a, b) - rho2 / c2;
}

double ciou(const BBox& a, const BBox& b) {
  const double base = diou(a, b);
  const double i = iou(a, b);
  const double da = std::atan(a.width() / a.height()) - std::atan(b.width() / b.height());
  const double v = (4.0 / (kPi * kPi)) * da * da;
  if (v <= 0.0 || i <= 0.0) return base;  // alpha defined as 0 when IoU is 0
  const double alpha = v / ((1.0 - i) + v);
  return base - alpha * v;
}

}  // namespace asahi
