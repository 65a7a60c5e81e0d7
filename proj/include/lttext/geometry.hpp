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

// Planar polygon arithmetic for text-region matching.
//
// Polygons are simple, possibly non-convex vertex rings in pixel
// coordinates. Intersection areas are computed by decomposing each polygon
// into a signed triangle fan around a shared origin: the indicator function
// of a simple polygon equals the signed sum of its fan triangles' indicators
// almost everywhere, so the area of A∩B is the signed sum of all pairwise
// triangle∩triangle areas, each of which is a convex clip.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lttext/error.hpp"

namespace lttext {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Axis-aligned bounds; closed on all sides.
struct Box {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  bool overlaps(const Box& o) const {
    return min_x <= o.max_x && o.min_x <= max_x && min_y <= o.max_y && o.min_y <= max_y;
  }
  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
};

/// Twice the signed area of triangle (o, a, b); positive when counter-clockwise.
inline double cross(Point o, Point a, Point b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

enum class PolygonStatus { Valid, Degenerate, SelfIntersecting };

namespace detail {

inline int orientation(Point a, Point b, Point c) {
  const double v = cross(a, b, c);
  return (v > 0.0) - (v < 0.0);
}

// p is collinear with segment ab; true when it lies within the segment's box.
inline bool within_segment_box(Point a, Point b, Point p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

/// Closed-segment intersection test (touching counts).
inline bool segments_intersect(Point p1, Point p2, Point q1, Point q2) {
  const int d1 = orientation(q1, q2, p1);
  const int d2 = orientation(q1, q2, p2);
  const int d3 = orientation(p1, p2, q1);
  const int d4 = orientation(p1, p2, q2);
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && within_segment_box(q1, q2, p1)) return true;
  if (d2 == 0 && within_segment_box(q1, q2, p2)) return true;
  if (d3 == 0 && within_segment_box(p1, p2, q1)) return true;
  if (d4 == 0 && within_segment_box(p1, p2, q2)) return true;
  return false;
}

inline double signed_area(std::span<const Point> pts) {
  if (pts.size() < 3) return 0.0;
  // Accumulate relative to the first vertex to limit cancellation.
  const Point o = pts[0];
  double twice = 0.0;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) twice += cross(o, pts[i], pts[i + 1]);
  return 0.5 * twice;
}

inline Box bounds_of(std::span<const Point> pts) {
  if (pts.empty()) return {};
  Box b{pts[0].x, pts[0].y, pts[0].x, pts[0].y};
  for (const Point& p : pts) {
    b.min_x = std::min(b.min_x, p.x);
    b.min_y = std::min(b.min_y, p.y);
    b.max_x = std::max(b.max_x, p.x);
    b.max_y = std::max(b.max_y, p.y);
  }
  return b;
}

/// True when every vertex lies on the line through the first vertex and
/// the vertex farthest from it.
inline bool collinear(std::span<const Point> v, double tolerance) {
  std::size_t far = 0;
  double best = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double d = std::hypot(v[i].x - v[0].x, v[i].y - v[0].y);
    if (d > best) {
      best = d;
      far = i;
    }
  }
  if (far == 0) return true;
  for (const Point& p : v) {
    if (std::abs(cross(v[0], v[far], p)) > tolerance) return false;
  }
  return true;
}

inline bool is_simple_ring(std::span<const Point> v) {
  const std::size_t n = v.size();
  if (n < 3) return false;
  auto edge_box = [&](std::size_t i) {
    const Point a = v[i];
    const Point b = v[(i + 1) % n];
    return Box{std::min(a.x, b.x), std::min(a.y, b.y), std::max(a.x, b.x), std::max(a.y, b.y)};
  };
  for (std::size_t i = 0; i < n; ++i) {
    // Adjacent edges share vertex v[i+1]; they may only meet there, so a
    // collinear fold-back is an overlap.
    const Point a = v[i];
    const Point s = v[(i + 1) % n];
    const Point b = v[(i + 2) % n];
    if (orientation(a, s, b) == 0 &&
        (a.x - s.x) * (b.x - s.x) + (a.y - s.y) * (b.y - s.y) > 0.0) {
      return false;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Box bi = edge_box(i);
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent through the closing vertex
      if (!bi.overlaps(edge_box(j))) continue;
      if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) return false;
    }
  }
  return true;
}

}  // namespace detail

/// Vertex ring with normalized orientation (positive signed area, i.e.
/// counter-clockwise in a y-up frame). Construction merges consecutive
/// vertices closer than `kMergeTolerance` and records validity; operations
/// that need a valid polygon throw on degenerate or self-intersecting input.
class Polygon {
 public:
  static constexpr double kMergeTolerance = 1e-6;

  Polygon() = default;

  explicit Polygon(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
    for (const Point& p : vertices_) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        throw NonFiniteCoordinate("polygon vertex is not finite");
      }
    }
    merge_duplicates();
    bounds_ = detail::bounds_of(vertices_);
    double a = detail::signed_area(vertices_);
    if (a < 0.0) {
      std::reverse(vertices_.begin() + 1, vertices_.end());
      a = -a;
    }
    area_ = a;
    const double extent = std::max(bounds_.width(), bounds_.height());
    const double tiny = 1e-12 * extent * extent;
    if (vertices_.size() < 3 || detail::collinear(vertices_, tiny)) {
      status_ = PolygonStatus::Degenerate;
    } else if (!detail::is_simple_ring(vertices_)) {
      status_ = PolygonStatus::SelfIntersecting;
    } else if (!(area_ > tiny)) {
      status_ = PolygonStatus::Degenerate;
    } else {
      status_ = PolygonStatus::Valid;
    }
  }

  Polygon(std::initializer_list<Point> pts) : Polygon(std::vector<Point>(pts)) {}

  /// Axis-aligned rectangle [x0,x1]×[y0,y1].
  static Polygon rectangle(double x0, double y0, double x1, double y1) {
    return Polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
  }

  std::span<const Point> vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  const Box& bounds() const { return bounds_; }
  PolygonStatus status() const { return status_; }
  bool is_valid() const { return status_ == PolygonStatus::Valid; }

  /// Throws DegeneratePolygon or SelfIntersectingPolygon unless valid.
  void require_valid() const {
    switch (status_) {
      case PolygonStatus::Valid: return;
      case PolygonStatus::Degenerate:
        throw DegeneratePolygon("polygon has fewer than 3 distinct vertices or zero area");
      case PolygonStatus::SelfIntersecting:
        throw SelfIntersectingPolygon("polygon edges intersect");
    }
  }

  /// Absolute enclosed area.
  double area() const {
    require_valid();
    return area_;
  }

  Polygon translated(double dx, double dy) const {
    std::vector<Point> out(vertices_);
    for (Point& p : out) {
      p.x += dx;
      p.y += dy;
    }
    return Polygon(std::move(out));
  }

  Polygon scaled(double s) const {
    std::vector<Point> out(vertices_);
    for (Point& p : out) {
      p.x *= s;
      p.y *= s;
    }
    return Polygon(std::move(out));
  }

  friend bool operator==(const Polygon& a, const Polygon& b) { return a.vertices_ == b.vertices_; }

 private:
  void merge_duplicates() {
    auto close = [](Point a, Point b) {
      return std::abs(a.x - b.x) <= kMergeTolerance && std::abs(a.y - b.y) <= kMergeTolerance;
    };
    std::vector<Point> out;
    out.reserve(vertices_.size());
    for (const Point& p : vertices_) {
      if (out.empty() || !close(out.back(), p)) out.push_back(p);
    }
    while (out.size() > 1 && close(out.back(), out.front())) out.pop_back();
    vertices_ = std::move(out);
  }

  std::vector<Point> vertices_;
  Box bounds_{};
  double area_ = 0.0;
  PolygonStatus status_ = PolygonStatus::Degenerate;
};

inline double area(const Polygon& p) { return p.area(); }

namespace detail {

struct FanTriangle {
  std::array<Point, 3> v;  // counter-clockwise
  double sign;             // +1 or -1: orientation of the original fan triangle
  Box box;
};

inline std::vector<FanTriangle> fan(const Polygon& poly, Point origin) {
  const auto v = poly.vertices();
  std::vector<FanTriangle> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point a = v[i];
    const Point b = v[(i + 1) % v.size()];
    const double c = cross(origin, a, b);
    if (c == 0.0) continue;
    FanTriangle t{};
    t.v = c > 0.0 ? std::array<Point, 3>{origin, a, b} : std::array<Point, 3>{origin, b, a};
    t.sign = c > 0.0 ? 1.0 : -1.0;
    t.box = bounds_of(t.v);
    out.push_back(t);
  }
  return out;
}

// Area of the intersection of two counter-clockwise triangles
// (Sutherland-Hodgman against the three half-planes of `clip`).
inline double triangle_overlap(const std::array<Point, 3>& subject,
                               const std::array<Point, 3>& clip) {
  std::array<Point, 12> in{};
  std::array<Point, 12> out{};
  std::size_t n = 3;
  std::copy(subject.begin(), subject.end(), in.begin());
  for (std::size_t k = 0; k < 3 && n > 0; ++k) {
    const Point c0 = clip[k];
    const Point c1 = clip[(k + 1) % 3];
    std::size_t m = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Point cur = in[i];
      const Point prev = in[(i + n - 1) % n];
      const double dc = cross(c0, c1, cur);
      const double dp = cross(c0, c1, prev);
      const bool cur_in = dc >= 0.0;
      const bool prev_in = dp >= 0.0;
      if (cur_in != prev_in) {
        const double t = dp / (dp - dc);
        out[m++] = {prev.x + t * (cur.x - prev.x), prev.y + t * (cur.y - prev.y)};
      }
      if (cur_in) out[m++] = cur;
    }
    std::swap(in, out);
    n = m;
  }
  if (n < 3) return 0.0;
  return std::max(0.0, signed_area(std::span<const Point>(in.data(), n)));
}

}  // namespace detail

/// Area of a∩b for arbitrary simple polygons.
inline double intersection_area(const Polygon& a, const Polygon& b) {
  const double area_a = a.area();
  const double area_b = b.area();
  const Box& ba = a.bounds();
  const Box& bb = b.bounds();
  if (!ba.overlaps(bb)) return 0.0;
  // Symmetric in (a, b) and translation-covariant.
  const Point origin{0.5 * (std::max(ba.min_x, bb.min_x) + std::min(ba.max_x, bb.max_x)),
                     0.5 * (std::max(ba.min_y, bb.min_y) + std::min(ba.max_y, bb.max_y))};
  const auto fa = detail::fan(a, origin);
  const auto fb = detail::fan(b, origin);
  double sum = 0.0;
  for (const auto& ta : fa) {
    for (const auto& tb : fb) {
      if (!ta.box.overlaps(tb.box)) continue;
      sum += ta.sign * tb.sign * detail::triangle_overlap(ta.v, tb.v);
    }
  }
  return std::clamp(sum, 0.0, std::min(area_a, area_b));
}

inline double union_area(const Polygon& a, const Polygon& b) {
  return a.area() + b.area() - intersection_area(a, b);
}

/// Intersection over union, in [0, 1].
inline double iou(const Polygon& a, const Polygon& b) {
  const double inter = intersection_area(a, b);
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

/// Fraction of `a` covered by `b`.
inline double intersection_over_first(const Polygon& a, const Polygon& b) {
  return std::clamp(intersection_area(a, b) / a.area(), 0.0, 1.0);
}

}  // namespace lttext
