#include "asahi/detection.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace asahi {

std::string format_interchange_line(long image_id, const Detection& det) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%ld %d %.6f %.6f %.6f %.6f %.6f", image_id, det.class_id,
                det.score, det.box.x1(), det.box.y1(), det.box.x2(), det.box.y2());
  return std::string(buf);
}

void write_interchange(std::ostream& out, long image_id, const std::vector<Detection>& dets) {
  for (const Detection& det : dets) {
    out << format_interchange_line(image_id, det) << '\n';
  }
}

std::vector<InterchangeRecord> parse_interchange(std::istream& in) {
  std::vector<InterchangeRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    long image_id = 0;
    int class_id = 0;
    double score = 0, x1 = 0, y1 = 0, x2 = 0, y2 = 0;
    std::string extra;
    if (!(fields >> image_id >> class_id >> score >> x1 >> y1 >> x2 >> y2) || (fields >> extra)) {
      throw std::runtime_error("interchange parse error at line " + std::to_string(line_no) +
                               ": expected 'image_id class_id score x1 y1 x2 y2', got: " + line);
    }
    if (class_id < 0 || score < 0.0 || score > 1.0 || !(x2 > x1) || !(y2 > y1)) {
      throw std::runtime_error("interchange parse error at line " + std::to_string(line_no) +
                               ": field out of range: " + line);
    }
    records.push_back({image_id, Detection(class_id, score, BBox(x1, y1, x2, y2))});
  }
  return records;
}

std::vector<InterchangeRecord> parse_interchange_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open detections file: " + path);
  return parse_interchange(in);
}

}  // namespace asahi
