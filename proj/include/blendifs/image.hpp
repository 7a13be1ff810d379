#pragma once

// Binary 8-bit grayscale PGM (P5) rendering of discrete sets.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "blendifs/error.hpp"
#include "blendifs/grid.hpp"

namespace blendifs {

struct RenderSpec {
  int width = 0;   // 0: one pixel per grid node
  int height = 0;
  std::uint8_t foreground = 0;
  std::uint8_t background = 255;
  bool y_up = true;  // row 0 shows the largest y
};

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, row 0 on top
};

inline GrayImage render(const DiscreteSet& s, const RenderSpec& spec = {}) {
  if (spec.width < 0 || spec.height < 0) throw Error(ErrorKind::BadLength, "image size must be positive");
  const int side = s.grid().side();
  GrayImage img;
  img.width = spec.width > 0 ? spec.width : side;
  img.height = spec.height > 0 ? spec.height : side;
  img.pixels.assign(static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height), spec.background);
  s.for_each([&](CellIndex c) {
    const auto px = static_cast<std::int64_t>(c.i) * img.width / side;
    auto py = static_cast<std::int64_t>(c.j) * img.height / side;
    if (spec.y_up) py = img.height - 1 - py;
    img.pixels[static_cast<std::size_t>(py * img.width + px)] = spec.foreground;
  });
  return img;
}

inline void write_pgm(std::ostream& os, const GrayImage& img) {
  os << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  os.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
}

}  // namespace blendifs
