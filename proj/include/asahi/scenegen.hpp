#pragma once

#include <cstdint>
#include <string>

#include "asahi/raster.hpp"
#include "asahi/scene.hpp"

namespace asahi {

/// Recipe for one deterministic synthetic scene. Object edges are sampled
/// log-uniformly: the small population below the 32 px small-object bound,
/// the big population above it. small_fraction of the objects (rounded) are
/// drawn from the small population.
struct SceneSpec {
  std::uint64_t seed = 1;
  ImageDims dims{1920, 1080};
  int object_count = 100;
  int class_count = 3;
  double small_edge_min = 8.0;
  double small_edge_max = 28.0;
  double big_edge_min = 36.0;
  double big_edge_max = 180.0;
  double crowding_max_iou = 0.3;  // max allowed pairwise IoU between objects
  double small_fraction = 0.7;

  void validate() const;
};

/// Deterministic given the seed. Placement uses rejection sampling against
/// the crowding cap with at most 100 attempts per object; objects placed
/// after relaxation are counted in Scene::relaxed_placements.
Scene generate_scene(const SceneSpec& spec);

/// Filled class-colored rectangles on a neutral background; objects are
/// drawn in index order, so later objects paint over earlier ones.
Raster render_scene(const Scene& scene);
void render_ppm(const Scene& scene, const std::string& path);

/// Deterministic palette lookup used by render_scene.
void class_color(int class_id, std::uint8_t rgb[3]);

}  // namespace asahi
