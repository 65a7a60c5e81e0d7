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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "lttext/geometry.hpp"
#include "support/polygon_gen.hpp"
#include "support/raster_oracle.hpp"

namespace lttext {
namespace {

using testing::box;
using testing::rasterized_iou;

TEST(Area, UnitSquare) { EXPECT_DOUBLE_EQ(area(box(0, 0, 1, 1)), 1.0); }

TEST(Area, RightTriangle) {
  EXPECT_DOUBLE_EQ(area(Polygon({{0, 0}, {4, 0}, {0, 3}})), 6.0);
}

TEST(Area, CollinearPointsAreDegenerate) {
  const Polygon p({{0, 0}, {1, 1}, {2, 2}});
  EXPECT_EQ(p.status(), PolygonStatus::Degenerate);
  EXPECT_THROW(area(p), DegeneratePolygon);
}

TEST(Area, TwoVerticesAreDegenerate) {
  EXPECT_THROW(area(Polygon({{0, 0}, {3, 3}})), DegeneratePolygon);
}

TEST(Polygon, ClockwiseInputIsReoriented) {
  const Polygon cw({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  EXPECT_DOUBLE_EQ(area(cw), 1.0);
  EXPECT_GT(detail::signed_area(cw.vertices()), 0.0);
  EXPECT_EQ(cw.vertices().front().x, 0.0);
  EXPECT_EQ(cw.vertices().front().y, 0.0);
}

TEST(Polygon, RepeatedVerticesMerge) {
  const Polygon p({{0, 0}, {0, 0}, {2, 0}, {2, 0.0000001}, {2, 2}, {0, 2}, {0, 0}});
  EXPECT_EQ(p.size(), 4u);
  EXPECT_DOUBLE_EQ(area(p), 4.0);
}

TEST(Polygon, BowTieIsSelfIntersecting) {
  const Polygon p({{0, 0}, {2, 2}, {2, 0}, {0, 2}});
  EXPECT_EQ(p.status(), PolygonStatus::SelfIntersecting);
  EXPECT_THROW(area(p), SelfIntersectingPolygon);
  EXPECT_THROW(iou(p, box(0, 0, 1, 1)), InvalidPolygon);
}

TEST(Polygon, NonFiniteCoordinateThrows) {
  EXPECT_THROW(Polygon({{0, 0}, {std::numeric_limits<double>::quiet_NaN(), 0}, {1, 1}}),
               NonFiniteCoordinate);
  EXPECT_THROW(Polygon({{0, 0}, {std::numeric_limits<double>::infinity(), 0}, {1, 1}}),
               NonFiniteCoordinate);
}

TEST(Intersection, OverlappingSquares) {
  EXPECT_NEAR(intersection_area(box(0, 0, 2, 2), box(1, 1, 3, 3)), 1.0, 1e-12);
}

TEST(Intersection, DisjointSquares) {
  EXPECT_EQ(intersection_area(box(0, 0, 1, 1), box(5, 5, 6, 6)), 0.0);
}

TEST(Intersection, WithItself) {
  const Polygon l({{0, 0}, {4, 0}, {4, 1}, {1, 1}, {1, 4}, {0, 4}});
  EXPECT_NEAR(intersection_area(l, l), area(l), 1e-12);
}

TEST(Intersection, ConcaveAgainstConvex) {
  // L-shape (area 7) against the square filling its notch: overlap is the
  // two unit strips along the notch edges.
  const Polygon l({{0, 0}, {4, 0}, {4, 1}, {1, 1}, {1, 4}, {0, 4}});
  EXPECT_NEAR(intersection_area(l, box(0.5, 0.5, 3, 3)), 0.5 * 2.5 + 0.5 * 2.0, 1e-12);
  EXPECT_NEAR(intersection_area(l, box(1, 1, 4, 4)), 0.0, 1e-12);
}

TEST(Intersection, UShapeSpanningBar) {
  // U of area 3·3 − 1·2 = 7; horizontal bar through both prongs.
  const Polygon u({{0, 0}, {3, 0}, {3, 3}, {2, 3}, {2, 1}, {1, 1}, {1, 3}, {0, 3}});
  ASSERT_TRUE(u.is_valid());
  EXPECT_NEAR(area(u), 7.0, 1e-12);
  EXPECT_NEAR(intersection_area(u, box(-1, 2, 4, 2.5)), 2 * 0.5, 1e-12);
}

TEST(Iou, IdenticalSquares) { EXPECT_DOUBLE_EQ(iou(box(0, 0, 2, 2), box(0, 0, 2, 2)), 1.0); }

TEST(Iou, OffsetSquares) { EXPECT_NEAR(iou(box(0, 0, 2, 2), box(1, 1, 3, 3)), 1.0 / 7.0, 1e-12); }

TEST(Iou, Disjoint) { EXPECT_EQ(iou(box(0, 0, 1, 1), box(5, 5, 6, 6)), 0.0); }

TEST(IntersectionOverFirst, Containment) {
  EXPECT_DOUBLE_EQ(intersection_over_first(box(1, 1, 2, 2), box(0, 0, 5, 5)), 1.0);
}

TEST(IntersectionOverFirst, Disjoint) {
  EXPECT_EQ(intersection_over_first(box(0, 0, 1, 1), box(5, 5, 6, 6)), 0.0);
}

TEST(IntersectionOverFirst, OffsetSquares) {
  EXPECT_NEAR(intersection_over_first(box(0, 0, 2, 2), box(1, 1, 3, 3)), 0.25, 1e-12);
}

TEST(RasterOracle, IdenticalSquares) {
  EXPECT_EQ(rasterized_iou(testing::box_ring(0, 0, 2, 2), testing::box_ring(0, 0, 2, 2), 256), 1.0);
}

TEST(RasterOracle, OffsetSquares) {
  EXPECT_NEAR(rasterized_iou(testing::box_ring(0, 0, 2, 2), testing::box_ring(1, 1, 3, 3), 1024),
              0.1429, 0.01);
}

TEST(RasterOracle, Disjoint) {
  EXPECT_EQ(rasterized_iou(testing::box_ring(0, 0, 1, 1), testing::box_ring(5, 5, 6, 6), 256), 0.0);
}

class RandomPairs : public ::testing::Test {
 protected:
  std::mt19937_64 rng{20240917};
};

TEST_F(RandomPairs, InvariantsHold) {
  for (int trial = 0; trial < 500; ++trial) {
    const auto pair = testing::random_pair(rng);
    const Polygon a = testing::to_polygon(pair.a);
    const Polygon b = testing::to_polygon(pair.b);
    ASSERT_TRUE(a.is_valid());
    ASSERT_TRUE(b.is_valid());
    const double ab = iou(a, b);
    EXPECT_NEAR(ab, iou(b, a), 1e-9);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0 + 1e-9);
    EXPECT_GE(iou(a, a), 1.0 - 1e-9);
    EXPECT_LE(intersection_area(a, b), std::min(area(a), area(b)) + 1e-9);
    EXPECT_NEAR(iou(a.translated(137.25, -41.5), b.translated(137.25, -41.5)), ab, 1e-9);
    EXPECT_NEAR(iou(a.scaled(3.7), b.scaled(3.7)), ab, 1e-7);
    EXPECT_NEAR(iou(a.scaled(0.05), b.scaled(0.05)), ab, 1e-7);
  }
}

TEST_F(RandomPairs, AgreesWithRasterOracle) {
  for (int trial = 0; trial < 100; ++trial) {
    const auto pair = testing::random_pair(rng);
    const double exact = iou(testing::to_polygon(pair.a), testing::to_polygon(pair.b));
    EXPECT_NEAR(exact, rasterized_iou(pair.a, pair.b, 1024), 0.01) << "trial " << trial;
  }
}

TEST_F(RandomPairs, GeneratedRingsAreSimple) {
  for (int trial = 0; trial < 1000; ++trial) {
    const auto pair = testing::random_pair(rng);
    EXPECT_TRUE(testing::to_polygon(pair.a).is_valid());
    EXPECT_GE(pair.a.size(), 4u);
    EXPECT_LE(pair.a.size(), 12u);
  }
}

}  // namespace
}  // namespace lttext
