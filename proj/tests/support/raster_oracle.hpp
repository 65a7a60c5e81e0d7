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

// Rasterized IoU: polygons are sampled at the cell centres of a res×res grid
// spanning their joint bounding box, using even-odd scanline crossings.
// Shares no code with the library's clipping path.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace lttext::testing {

struct XY {
  double x;
  double y;
};

using Ring = std::vector<XY>;

namespace detail {

/// x positions where the horizontal line at y crosses the ring, sorted.
inline std::vector<double> crossings(const Ring& ring, double y) {
  std::vector<double> xs;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const XY& a = ring[i];
    const XY& b = ring[(i + 1) % n];
    if ((a.y > y) != (b.y > y)) xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
  }
  std::sort(xs.begin(), xs.end());
  return xs;
}

/// Marks cells whose centre lies inside [xs[2k], xs[2k+1]).
inline void fill_row(const std::vector<double>& xs, double x0, double dx, std::size_t res,
                     std::vector<unsigned char>& row, unsigned char bit) {
  for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
    // centre j at x0 + (j + 0.5) dx
    const double lo = (xs[k] - x0) / dx - 0.5;
    const double hi = (xs[k + 1] - x0) / dx - 0.5;
    auto first = static_cast<long long>(std::ceil(lo));
    auto last = static_cast<long long>(std::ceil(hi)) - 1;
    first = std::max<long long>(first, 0);
    last = std::min<long long>(last, static_cast<long long>(res) - 1);
    for (long long j = first; j <= last; ++j) row[static_cast<std::size_t>(j)] |= bit;
  }
}

}  // namespace detail

inline double rasterized_iou(const Ring& a, const Ring& b, std::size_t res = 1024) {
  double min_x = a[0].x, max_x = a[0].x, min_y = a[0].y, max_y = a[0].y;
  for (const Ring* r : {&a, &b}) {
    for (const XY& p : *r) {
      min_x = std::min(min_x, p.x);
      max_x = std::max(max_x, p.x);
      min_y = std::min(min_y, p.y);
      max_y = std::max(max_y, p.y);
    }
  }
  const double dx = (max_x - min_x) / static_cast<double>(res);
  const double dy = (max_y - min_y) / static_cast<double>(res);
  if (dx <= 0.0 || dy <= 0.0) return 0.0;
  std::size_t in_a = 0, in_b = 0, in_both = 0;
  std::vector<unsigned char> row(res);
  for (std::size_t i = 0; i < res; ++i) {
    const double y = min_y + (static_cast<double>(i) + 0.5) * dy;
    std::fill(row.begin(), row.end(), 0);
    detail::fill_row(detail::crossings(a, y), min_x, dx, res, row, 1);
    detail::fill_row(detail::crossings(b, y), min_x, dx, res, row, 2);
    for (unsigned char c : row) {
      in_a += (c & 1) != 0;
      in_b += (c & 2) != 0;
      in_both += c == 3;
    }
  }
  const std::size_t uni = in_a + in_b - in_both;
  return uni == 0 ? 0.0 : static_cast<double>(in_both) / static_cast<double>(uni);
}

}  // namespace lttext::testing
