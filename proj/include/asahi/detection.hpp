#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "asahi/geom.hpp"

namespace asahi {

/// Where a detection came from: the full-image pass or a slice grid cell.
struct Origin {
  enum class Kind { FullInference, Slice };

  Kind kind = Kind::FullInference;
  int row = -1;
  int col = -1;

  static Origin full_inference() { return {Kind::FullInference, -1, -1}; }
  static Origin slice(int row, int col) { return {Kind::Slice, row, col}; }
  bool is_slice() const { return kind == Kind::Slice; }

  friend bool operator==(const Origin&, const Origin&) = default;
};

struct Detection {
  Detection(int class_id, double score, const BBox& box,
            const Origin& origin = Origin::full_inference())
      : class_id(class_id), score(score), box(box), origin(origin) {}

  int class_id;
  double score;
  BBox box;
  Origin origin;
};

/// One parsed line of the interchange format.
struct InterchangeRecord {
  long image_id;
  Detection detection;
};

/// Detection interchange format: one detection per line,
///   image_id class_id score x1 y1 x2 y2
/// whitespace-separated, full-image pixel coordinates, score and coordinates
/// printed with six decimal places. The byte layout is fixed so adapters in
/// any language interoperate.
std::string format_interchange_line(long image_id, const Detection& det);
void write_interchange(std::ostream& out, long image_id, const std::vector<Detection>& dets);

/// Parses until EOF; blank lines are ignored. Throws std::runtime_error
/// naming the 1-based line number on any malformed line.
std::vector<InterchangeRecord> parse_interchange(std::istream& in);
std::vector<InterchangeRecord> parse_interchange_file(const std::string& path);

}  // namespace asahi
