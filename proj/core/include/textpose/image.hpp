#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "textpose/nn/tensor.hpp"

namespace textpose {

// 8-bit RGB, interleaved, row-major.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  static Image blank(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b);

  std::uint8_t* px(int x, int y) { return pixels.data() + 3 * (static_cast<std::size_t>(y) * width + x); }
  const std::uint8_t* px(int x, int y) const {
    return pixels.data() + 3 * (static_cast<std::size_t>(y) * width + x);
  }
};

Image read_png(const std::string& path);
void write_png(const Image& img, const std::string& path);

// 8-bit channels map linearly onto [-1, 1].
nn::Tensor image_to_unit(const Image& img);            // [3,H,W]
Image unit_to_image(const nn::Tensor& t);              // rounds and clamps

// Rec.601 luma in [0, 255], row-major doubles; used by the metrics.
std::vector<double> image_luma(const Image& img);

}  // namespace textpose
