// facevox/image.hpp

// Copyright 2026  FaceVox Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef FACEVOX_IMAGE_HPP_
#define FACEVOX_IMAGE_HPP_

#include <cassert>
#include <cmath>
#include <vector>

namespace facevox {

// Grayscale image, row-major doubles on the raw 8-bit scale [0, 255].
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, double fill = 0.0)
      : width(w), height(h), pixels(static_cast<size_t>(w) * h, fill) {}

  double &At(int x, int y) {
    assert(x >= 0 && x < width && y >= 0 && y < height);
    return pixels[static_cast<size_t>(y) * width + x];
  }
  double At(int x, int y) const {
    assert(x >= 0 && x < width && y >= 0 && y < height);
    return pixels[static_cast<size_t>(y) * width + x];
  }
};

// Bilinear sample at a real-valued position; zero outside the image.
// At exact integer coordinates this returns the pixel value itself.
inline double BilinearSample(const GrayImage &img, double x, double y) {
  if (x < 0.0 || y < 0.0 || x > img.width - 1 || y > img.height - 1) {
    return 0.0;
  }
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, img.width - 1);
  const int y1 = std::min(y0 + 1, img.height - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = (1.0 - fx) * img.At(x0, y0) + fx * img.At(x1, y0);
  const double bot = (1.0 - fx) * img.At(x0, y1) + fx * img.At(x1, y1);
  return (1.0 - fy) * top + fy * bot;
}

// Bilinear resize used for detection pyramids.
inline GrayImage ResizeBilinear(const GrayImage &img, int new_w, int new_h) {
  GrayImage out(new_w, new_h);
  const double sx = new_w > 1 ? double(img.width - 1) / (new_w - 1) : 0.0;
  const double sy = new_h > 1 ? double(img.height - 1) / (new_h - 1) : 0.0;
  for (int y = 0; y < new_h; ++y) {
    for (int x = 0; x < new_w; ++x) {
      out.At(x, y) = BilinearSample(img, x * sx, y * sy);
    }
  }
  return out;
}

}  // namespace facevox

#endif  // FACEVOX_IMAGE_HPP_
