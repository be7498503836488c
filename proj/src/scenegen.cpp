#include "asahi/scenegen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "asahi/rng.hpp"

namespace asahi {

namespace {

constexpr int kMaxPlacementAttempts = 100;
constexpr double kSmallEdgeBound = 32.0;  // edge below this keeps area under 32^2

BBox sample_box(SplitMix64& rng, const ImageDims& dims, bool small, const SceneSpec& spec) {
  const double lo = small ? spec.small_edge_min : spec.big_edge_min;
  const double hi = small ? std::min(spec.small_edge_max, kSmallEdgeBound - 0.5) : spec.big_edge_max;
  const double edge = rng.log_uniform(lo, std::max(lo, hi));
  const double aspect = rng.uniform(0.5, 2.0);
  double w = edge * std::sqrt(aspect);
  double h = edge / std::sqrt(aspect);
  w = std::clamp(w, 1.0, static_cast<double>(dims.width));
  h = std::clamp(h, 1.0, static_cast<double>(dims.height));
  const double x = rng.uniform(0.0, dims.width - w);
  const double y = rng.uniform(0.0, dims.height - h);
  return BBox(x, y, x + w, y + h);
}

}  // namespace

void SceneSpec::validate() const {
  if (object_count < 0) throw std::invalid_argument("SceneSpec: negative object count");
  if (class_count < 1) throw std::invalid_argument("SceneSpec: need at least one class");
  if (small_edge_min <= 0 || big_edge_min <= 0 || small_edge_max < small_edge_min ||
      big_edge_max < big_edge_min) {
    throw std::invalid_argument("SceneSpec: edge ranges must be positive and ordered");
  }
  if (small_fraction < 0.0 || small_fraction > 1.0) {
    throw std::invalid_argument("SceneSpec: small fraction must be in [0,1]");
  }
}

Scene generate_scene(const SceneSpec& spec) {
  spec.validate();
  Scene scene;
  scene.dims = spec.dims;
  scene.image_id = static_cast<long>(spec.seed);

  const int small_count = static_cast<int>(std::lround(spec.small_fraction * spec.object_count));
  SplitMix64 rng(mix64(spec.seed, 0x5ce17e5ull));
  for (int i = 0; i < spec.object_count; ++i) {
    const bool small = i < small_count;
    const int class_id = static_cast<int>(rng.next() % static_cast<std::uint64_t>(spec.class_count));
    bool placed = false;
    BBox candidate(0, 0, 1, 1);
    for (int attempt = 0; attempt < kMaxPlacementAttempts && !placed; ++attempt) {
      candidate = sample_box(rng, spec.dims, small, spec);
      placed = std::all_of(scene.objects.begin(), scene.objects.end(), [&](const GtObject& o) {
        return iou(o.box, candidate) <= spec.crowding_max_iou;
      });
    }
    if (!placed) {
      // Relaxation: keep the last candidate and record that the cap gave way.
      ++scene.relaxed_placements;
    }
    scene.objects.push_back({class_id, candidate});
  }
  return scene;
}

void class_color(int class_id, std::uint8_t rgb[3]) {
  // Golden-ratio hue walk; every class gets a stable, saturated color.
  const double hue = std::fmod(0.61803398875 * (class_id + 1), 1.0) * 6.0;
  const int sector = static_cast<int>(hue);
  const double f = hue - sector;
  const auto channel = [](double v) { return static_cast<std::uint8_t>(std::lround(v * 205.0) + 50); };
  const std::uint8_t q = channel(1.0 - f), t = channel(f), lo = channel(0.0), hi = channel(1.0);
  switch (sector % 6) {
    case 0: rgb[0] = hi; rgb[1] = t; rgb[2] = lo; break;
    case 1: rgb[0] = q; rgb[1] = hi; rgb[2] = lo; break;
    case 2: rgb[0] = lo; rgb[1] = hi; rgb[2] = t; break;
    case 3: rgb[0] = lo; rgb[1] = q; rgb[2] = hi; break;
    case 4: rgb[0] = t; rgb[1] = lo; rgb[2] = hi; break;
    default: rgb[0] = hi; rgb[1] = lo; rgb[2] = q; break;
  }
}

Raster render_scene(const Scene& scene) {
  Raster image(scene.dims.width, scene.dims.height, 96);  // neutral gray background
  for (const GtObject& object : scene.objects) {
    std::uint8_t rgb[3];
    class_color(object.class_id, rgb);
    const int x1 = std::clamp(static_cast<int>(object.box.x1()), 0, scene.dims.width);
    const int y1 = std::clamp(static_cast<int>(object.box.y1()), 0, scene.dims.height);
    const int x2 = std::clamp(static_cast<int>(std::ceil(object.box.x2())), 0, scene.dims.width);
    const int y2 = std::clamp(static_cast<int>(std::ceil(object.box.y2())), 0, scene.dims.height);
    for (int y = y1; y < y2; ++y) {
      for (int x = x1; x < x2; ++x) {
        image.at(x, y, 0) = rgb[0];
        image.at(x, y, 1) = rgb[1];
        image.at(x, y, 2) = rgb[2];
      }
    }
  }
  return image;
}

void render_ppm(const Scene& scene, const std::string& path) {
  write_ppm(render_scene(scene), path);
}

}  // namespace asahi
