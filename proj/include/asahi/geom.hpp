#pragma once

#include <cstdint>

namespace asahi {

/// Axis-aligned bounding box in real-valued pixel coordinates, corner form
/// (x1,y1) top-left, (x2,y2) bottom-right. Construction rejects degenerate
/// and non-finite boxes so every overlap metric can divide by areas and
/// diagonals without guards.
class BBox {
 public:
  BBox(double x1, double y1, double x2, double y2);

  double x1() const { return x1_; }
  double y1() const { return y1_; }
  double x2() const { return x2_; }
  double y2() const { return y2_; }

  double width() const { return x2_ - x1_; }
  double height() const { return y2_ - y1_; }
  double center_x() const { return 0.5 * (x1_ + x2_); }
  double center_y() const { return 0.5 * (y1_ + y2_); }
  double shorter_edge() const { return width() < height() ? width() : height(); }
  double longer_edge() const { return width() < height() ? height() : width(); }

  friend bool operator==(const BBox&, const BBox&) = default;

 private:
  double x1_, y1_, x2_, y2_;
};

/// Integer image dimensions, width x height, both at least one pixel.
struct ImageDims {
  ImageDims(int w, int h);

  int width;
  int height;

  std::int64_t pixel_count() const { return static_cast<std::int64_t>(width) * height; }
  int long_edge() const { return width < height ? height : width; }
  int short_edge() const { return width < height ? width : height; }

  friend bool operator==(const ImageDims&, const ImageDims&) = default;
};

double area(const BBox& b);
double intersection_area(const BBox& a, const BBox& b);

/// Intersection over union, in [0,1]; 0 for disjoint boxes.
double iou(const BBox& a, const BBox& b);

/// IoU minus (enclosing - union) / enclosing, in (-1, 1].
double giou(const BBox& a, const BBox& b);

/// IoU minus squared center distance over squared enclosing diagonal,
/// in (-1, 1].
double diou(const BBox& a, const BBox& b);

/// DIoU minus the aspect-ratio consistency term alpha*v.
double ciou(const BBox& a, const BBox& b);

}  // namespace asahi
