// Copyright 2026 The lttext Authors
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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "lttext/error.hpp"

namespace lttext {

/// Row-major, channel-interleaved raster with values normalized to [0, 1].
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<double> values;

  Image() = default;
  Image(int w, int h, int c, double fill = 0.0)
      : width(w), height(h), channels(c),
        values(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) *
                   static_cast<std::size_t>(c),
               fill) {}

  double& at(int x, int y, int c = 0) { return values[index(x, y, c)]; }
  double at(int x, int y, int c = 0) const { return values[index(x, y, c)]; }

 private:
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
            static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels) +
           static_cast<std::size_t>(c);
  }
};

/// Single-channel luma (ITU-R BT.601 weights for 3+ channels, mean otherwise).
inline Image to_gray(const Image& src) {
  if (src.channels == 1) return src;
  Image out(src.width, src.height, 1);
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < src.width; ++x) {
      double v = 0.0;
      if (src.channels >= 3) {
        v = 0.299 * src.at(x, y, 0) + 0.587 * src.at(x, y, 1) + 0.114 * src.at(x, y, 2);
      } else {
        for (int c = 0; c < src.channels; ++c) v += src.at(x, y, c);
        v /= src.channels;
      }
      out.at(x, y) = v;
    }
  }
  return out;
}

namespace detail {

// Box-filter weights mapping `src` samples onto `dst` cells of equal width.
inline std::vector<std::vector<std::pair<int, double>>> box_weights(int src, int dst) {
  std::vector<std::vector<std::pair<int, double>>> w(static_cast<std::size_t>(dst));
  const double scale = static_cast<double>(src) / dst;
  for (int o = 0; o < dst; ++o) {
    const double lo = o * scale;
    const double hi = (o + 1) * scale;
    for (int i = static_cast<int>(std::floor(lo)); i < src && i < hi; ++i) {
      const double overlap = std::min(hi, i + 1.0) - std::max(lo, static_cast<double>(i));
      if (overlap > 0.0) w[static_cast<std::size_t>(o)].emplace_back(i, overlap / scale);
    }
  }
  return w;
}

}  // namespace detail

/// Area-averaging resize of a single-channel image.
inline Image resize_area(const Image& gray, int dst_w, int dst_h) {
  if (gray.channels != 1) throw DimensionMismatch("resize_area expects one channel");
  if (gray.width <= 0 || gray.height <= 0) throw DimensionMismatch("empty image");
  const auto wx = detail::box_weights(gray.width, dst_w);
  const auto wy = detail::box_weights(gray.height, dst_h);
  Image rows(dst_w, gray.height, 1);
  for (int y = 0; y < gray.height; ++y) {
    for (int ox = 0; ox < dst_w; ++ox) {
      double v = 0.0;
      for (const auto& [x, w] : wx[static_cast<std::size_t>(ox)]) v += w * gray.at(x, y);
      rows.at(ox, y) = v;
    }
  }
  Image out(dst_w, dst_h, 1);
  for (int oy = 0; oy < dst_h; ++oy) {
    for (int ox = 0; ox < dst_w; ++ox) {
      double v = 0.0;
      for (const auto& [y, w] : wy[static_cast<std::size_t>(oy)]) v += w * rows.at(ox, y);
      out.at(ox, oy) = v;
    }
  }
  return out;
}

/// 64-bit difference hash: the image is reduced to 9×8 luma cells and bit
/// (8·row + col) is set when a cell is brighter than its right neighbour.
inline std::uint64_t difference_hash(const Image& img) {
  const Image small = resize_area(to_gray(img), 9, 8);
  std::uint64_t h = 0;
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      if (small.at(x, y) > small.at(x + 1, y)) h |= std::uint64_t{1} << (8 * y + x);
    }
  }
  return h;
}

}  // namespace lttext
