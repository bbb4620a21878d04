#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "sceneforge/error.hpp"
#include "sceneforge/geometry.hpp"

using namespace sceneforge;

namespace {

std::vector<Vec2> rectangle_points(Vec2 center, double w, double h, double phi) {
  // Corners plus edge midpoints, rotated by phi about the center.
  const std::vector<Vec2> local{{-w / 2, -h / 2}, {w / 2, -h / 2}, {w / 2, h / 2}, {-w / 2, h / 2},
                                {0, -h / 2},      {w / 2, 0},      {0, h / 2},    {-w / 2, 0}};
  std::vector<Vec2> out;
  for (const Vec2& p : local) out.push_back(center + rotate(p, phi));
  return out;
}

// Fraction of a fine sample lattice covered by both boxes over either box.
double sampled_oriented_iou(const OrientedBox& a, const OrientedBox& b, int n) {
  const auto inside = [](const OrientedBox& o, Vec2 p) {
    const Vec2 q = rotate(p - o.center, -o.theta);
    return std::abs(q.x) <= o.half_extents.x && std::abs(q.y) <= o.half_extents.y;
  };
  const double r = std::max({norm(a.half_extents), norm(b.half_extents)}) +
                   std::max(norm(a.center - b.center), 0.0);
  const Vec2 lo = a.center - Vec2{r, r};
  const double step = 2 * r / n;
  long both = 0, either = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vec2 p{lo.x + (i + 0.5) * step, lo.y + (j + 0.5) * step};
      const bool ia = inside(a, p), ib = inside(b, p);
      both += ia && ib;
      either += ia || ib;
    }
  }
  return static_cast<double>(both) / static_cast<double>(either);
}

}  // namespace

TEST_CASE("iou examples") {
  CHECK(iou({0, 0, 2, 2}, {0, 0, 2, 2}) == 1.0);
  CHECK(iou({0, 0, 1, 1}, {5, 5, 6, 6}) == 0.0);
  // intersection 2, union 6
  CHECK(iou({0, 0, 2, 2}, {1, 0, 3, 2}) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("iou degenerate boxes") {
  CHECK(iou({1, 1, 1, 1}, {1, 1, 1, 1}) == 1.0);
  CHECK(iou({1, 1, 1, 1}, {2, 2, 2, 2}) == 0.0);
  CHECK(iou({1, 1, 1, 1}, {0, 0, 2, 2}) == 0.0);
  CHECK(iou({0, 0, 0, 3}, {0, 0, 2, 2}) == 0.0);
}

TEST_CASE("iou is symmetric and reflexive on random boxes") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(-5, 5), ext(0.01, 3);
  for (int i = 0; i < 500; ++i) {
    const Aabb a = Aabb::from_center({pos(rng), pos(rng)}, ext(rng), ext(rng));
    const Aabb b = Aabb::from_center({pos(rng), pos(rng)}, ext(rng), ext(rng));
    CHECK(iou(a, b) == iou(b, a));
    CHECK(iou(a, a) == 1.0);
    CHECK(iou(a, b) >= 0.0);
    CHECK(iou(a, b) <= 1.0);
  }
}

TEST_CASE("min_area_orientation examples") {
  SUBCASE("axis-aligned 2x1") {
    const auto pts = rectangle_points({0, 0}, 2, 1, 0);
    const OrientationFit fit = min_area_orientation(pts);
    CHECK(fit.theta == 0.0);
    CHECK(fit.box.half_extents.x == doctest::Approx(1.0));
    CHECK(fit.box.half_extents.y == doctest::Approx(0.5));
  }
  SUBCASE("2x1 rotated 30 degrees") {
    const auto pts = rectangle_points({3, -1}, 2, 1, 30);
    const OrientationFit fit = min_area_orientation(pts);
    CHECK(fit.theta == 30.0);
    CHECK(fit.box.center.x == doctest::Approx(3.0));
    CHECK(fit.box.center.y == doctest::Approx(-1.0));
  }
  SUBCASE("unit square rotated 45: tie with 135 goes to the smaller angle") {
    const auto pts = rectangle_points({0, 0}, 1, 1, 45);
    CHECK(min_area_orientation(pts).theta == 45.0);
  }
  SUBCASE("long axis picks the half turn class of the rotation") {
    // 2x1 at 100 degrees: areas tie at 10 and 100, the long side is along x at 100.
    const auto pts = rectangle_points({0, 0}, 2, 1, 100);
    CHECK(min_area_orientation(pts).theta == 100.0);
  }
}

TEST_CASE("min_area_orientation rejects degenerate input") {
  const std::vector<Vec2> two{{0, 0}, {1, 1}};
  CHECK_THROWS_AS(min_area_orientation(two), GeometryError);
  const std::vector<Vec2> line{{0, 0}, {1, 1}, {2, 2}, {3, 3}};
  CHECK_THROWS_AS(min_area_orientation(line), GeometryError);
  const std::vector<Vec2> same{{1, 1}, {1, 1}, {1, 1}};
  CHECK_THROWS_AS(min_area_orientation(same), GeometryError);
}

TEST_CASE("orientation recovery for elongated rectangles") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> angle(0, 180), aspect(1.2, 4), size(0.3, 3), pos(-10, 10);
  for (int i = 0; i < 50; ++i) {
    const double phi = angle(rng);
    const double h = size(rng);
    const auto pts = rectangle_points({pos(rng), pos(rng)}, h * aspect(rng), h, phi);
    CHECK(half_turn_distance(min_area_orientation(pts).theta, phi) <= 1.0);
  }
}

TEST_CASE("orientation is invariant to translation and uniform scale") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> angle(0, 180), shift(-50, 50), scale(0.1, 10);
  for (int i = 0; i < 30; ++i) {
    const auto pts = rectangle_points({0, 0}, 1.7, 0.6, angle(rng));
    const double base = min_area_orientation(pts).theta;
    const Vec2 d{shift(rng), shift(rng)};
    const double s = scale(rng);
    std::vector<Vec2> moved;
    for (const Vec2& p : pts) moved.push_back(s * p + d);
    CHECK(min_area_orientation(moved).theta == base);
  }
}

TEST_CASE("theta_to_bin") {
  CHECK(theta_to_bin(0).index() == 0);
  CHECK(theta_to_bin(7.5).index() == 1);
  CHECK(theta_to_bin(184).index() == 0);
  CHECK(theta_to_bin(-5).index() == 35);
  CHECK(theta_to_bin(179.999999).index() == 35);
  for (int k = 0; k < OrientationBin::kCount; ++k) {
    CHECK(theta_to_bin(bin_to_theta(OrientationBin(k))).index() == k);
  }
  CHECK_THROWS_AS(OrientationBin(36), GeometryError);
}

TEST_CASE("nearest_wall") {
  const std::vector<Wall> walls{Wall{{1, -5}, {1, 5}}, Wall{{-5, 5}, {5, 5}}};
  const WallHit hit = nearest_wall({0, 0}, walls);
  CHECK(hit.index == 0);
  CHECK(hit.distance == doctest::Approx(1.0));

  const WallHit on = nearest_wall({1, 2}, walls);
  CHECK(on.index == 0);
  CHECK(on.distance == 0.0);

  const std::vector<Wall> twins{Wall{{-1, -5}, {-1, 5}}, Wall{{1, -5}, {1, 5}}};
  CHECK(nearest_wall({0, 0}, twins).index == 0);

  CHECK_THROWS_AS(nearest_wall({0, 0}, std::vector<Wall>{}), GeometryError);
}

TEST_CASE("wall orientation is reduced to a half turn") {
  CHECK(Wall{{0, 0}, {1, 0}}.orientation() == 0.0);
  CHECK(Wall{{1, 0}, {0, 0}}.orientation() == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(Wall{{0, 0}, {0, 1}}.orientation() == doctest::Approx(90.0));
  CHECK(Wall{{0, 1}, {0, 0}}.orientation() == doctest::Approx(90.0));
  CHECK(Wall{{0, 0}, {-1, -1}}.orientation() == doctest::Approx(45.0));
}

TEST_CASE("oriented iou matches a sampled oracle") {
  const Aabb base{0, 0, 2, 1};
  SUBCASE("5 degree misalignment") {
    const OrientedBox a = OrientedBox::from_aabb(base, 0);
    const OrientedBox b = OrientedBox::from_aabb(base, 5);
    CHECK(oriented_iou(a, b) == doctest::Approx(sampled_oriented_iou(a, b, 1200)).epsilon(3e-3));
    CHECK(oriented_iou(a, b) < 1.0);
  }
  SUBCASE("random pairs") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> angle(0, 180), off(-0.8, 0.8);
    for (int i = 0; i < 5; ++i) {
      const OrientedBox a{{0, 0}, {1.0, 0.4}, angle(rng)};
      const OrientedBox b{{off(rng), off(rng)}, {0.7, 0.6}, angle(rng)};
      CHECK(oriented_iou(a, b) == doctest::Approx(sampled_oriented_iou(a, b, 800)).epsilon(5e-3));
    }
  }
  CHECK(oriented_iou(OrientedBox::from_aabb(base, 30), OrientedBox::from_aabb(base, 30)) ==
        doctest::Approx(1.0));
}
