#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace asahi {

/// Interleaved 8-bit RGB raster, row-major.
struct Raster {
  Raster() = default;
  Raster(int w, int h, std::uint8_t fill = 0);

  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  std::uint8_t& at(int x, int y, int c) { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
  std::uint8_t at(int x, int y, int c) const { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }

  friend bool operator==(const Raster&, const Raster&) = default;
};

/// Binary P6 PPM, maxval 255. The one raster format every ecosystem can
/// read without a dependency, used for patch files and external detectors.
void write_ppm(const Raster& image, const std::string& path);
Raster read_ppm(const std::string& path);

}  // namespace asahi
