// Copyright 2026 The Vesseltree Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VESSELTREE_IMAGE_HPP_
#define VESSELTREE_IMAGE_HPP_

#include <algorithm>
#include <vector>

#include "vesseltree/core.hpp"

namespace vesseltree {

//! 2D scalar image, x-major like the lifted grid: index = x*height + y.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  Image() = default;
  Image(int w, int h, double fill = 0.0)
      : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {
    if (w < 1 || h < 1) throw ConfigError("Image: dimensions must be >= 1");
  }

  double& at(int x, int y) {
    return values[static_cast<std::size_t>(x) * height + y];
  }
  double at(int x, int y) const {
    return values[static_cast<std::size_t>(x) * height + y];
  }
  bool contains(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }

  double min_value() const {
    return *std::min_element(values.begin(), values.end());
  }
  double max_value() const {
    return *std::max_element(values.begin(), values.end());
  }

  //! Bilinear sample with border clamping.
  double sample(double x, double y) const {
    const int x0 = std::clamp(static_cast<int>(std::floor(x)), 0, width - 1);
    const int y0 = std::clamp(static_cast<int>(std::floor(y)), 0, height - 1);
    const int x1 = std::min(x0 + 1, width - 1);
    const int y1 = std::min(y0 + 1, height - 1);
    const double fx = std::clamp(x - x0, 0.0, 1.0);
    const double fy = std::clamp(y - y0, 0.0, 1.0);
    return (at(x0, y0) * (1 - fy) + at(x0, y1) * fy) * (1 - fx) +
           (at(x1, y0) * (1 - fy) + at(x1, y1) * fy) * fx;
  }

  Image crop(int x0, int y0, int w, int h) const {
    if (x0 < 0 || y0 < 0 || w < 1 || h < 1 || x0 + w > width ||
        y0 + h > height)
      throw ConfigError("crop window outside image bounds");
    Image out(w, h);
    for (int x = 0; x < w; ++x)
      for (int y = 0; y < h; ++y) out.at(x, y) = at(x0 + x, y0 + y);
    return out;
  }
};

}  // namespace vesseltree

#endif  // VESSELTREE_IMAGE_HPP_
