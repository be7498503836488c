#pragma once

#include <string>
#include <vector>

#include "asahi/geom.hpp"

namespace asahi {

struct GtObject {
  int class_id;
  BBox box;
};

/// One image's worth of ground truth: the unit of synthetic evaluation.
struct Scene {
  long image_id = 0;
  ImageDims dims{1, 1};
  std::string file_name;
  std::vector<GtObject> objects;
  int relaxed_placements = 0;  // objects placed after the crowding cap was relaxed
};

}  // namespace asahi
