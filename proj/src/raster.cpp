#include "asahi/raster.hpp"

#include <fstream>
#include <stdexcept>

namespace asahi {

namespace {

// Skips whitespace and '#' comments between PPM header tokens.
int read_header_int(std::istream& in, const std::string& path) {
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  if (c == EOF || !std::isdigit(c)) {
    throw std::runtime_error("read_ppm: malformed header in " + path);
  }
  int value = 0;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    c = in.get();
  }
  return value;
}

}  // namespace

Raster::Raster(int w, int h, std::uint8_t fill)
    : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, fill) {
  if (w < 1 || h < 1) throw std::invalid_argument("Raster: dimensions must be at least 1x1");
}

void write_ppm(const Raster& image, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_ppm: cannot open " + path);
  out << "P6\n" << image.width << " " << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.data.data()),
            static_cast<std::streamsize>(image.data.size()));
  if (!out) throw std::runtime_error("write_ppm: write failed for " + path);
}

Raster read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_ppm: cannot open " + path);
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (magic[0] != 'P' || magic[1] != '6') {
    throw std::runtime_error("read_ppm: not a P6 file: " + path);
  }
  const int w = read_header_int(in, path);
  const int h = read_header_int(in, path);
  const int maxval = read_header_int(in, path);
  if (maxval != 255) throw std::runtime_error("read_ppm: unsupported maxval in " + path);
  if (w < 1 || h < 1) throw std::runtime_error("read_ppm: bad dimensions in " + path);
  Raster image(w, h);
  in.read(reinterpret_cast<char*>(image.data.data()),
          static_cast<std::streamsize>(image.data.size()));
  if (in.gcount() != static_cast<std::streamsize>(image.data.size())) {
    throw std::runtime_error("read_ppm: truncated pixel data in " + path);
  }
  return image;
}

}  // namespace asahi
