#pragma once

#include "gsdie/types.hpp"

#include <string>
#include <vector>

namespace gsdie {

// Raster image with unit-scale float samples, row-major, channel-interleaved.
struct ImageTensor {
  int height = 0;
  int width = 0;
  int channels = 1;  // 1 (grey) or 3 (RGB)
  std::vector<double> data;  // in [0,1], size h*w*c

  double at(int r, int c, int ch) const {
    return data[static_cast<std::size_t>((r * width + c) * channels + ch)];
  }
  double& at(int r, int c, int ch) {
    return data[static_cast<std::size_t>((r * width + c) * channels + ch)];
  }
  Index pixels() const { return static_cast<Index>(height) * width; }

  static ImageTensor create(int height, int width, int channels, double fill = 0.0);
};

// Binary or ASCII netpbm (P2/P3/P5/P6), 8- or 16-bit. Samples are divided by
// maxval on read.
ImageTensor read_pnm(const std::string& path);
void write_pnm(const ImageTensor& img, const std::string& path);  // 8-bit P5/P6

// 8-bit greyscale/RGB PNG with stored (uncompressed) deflate blocks.
void write_png(const ImageTensor& img, const std::string& path);
// Reads PNGs produced by write_png (stored deflate only); rejects compressed
// files with a pointer at the PNM path.
ImageTensor read_png(const std::string& path);

// Dispatch on extension (.png, .pgm, .ppm, .pnm).
ImageTensor read_image(const std::string& path);

}  // namespace gsdie
