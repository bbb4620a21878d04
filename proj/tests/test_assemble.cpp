#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "sceneforge/assemble.hpp"
#include "sceneforge/error.hpp"

using namespace sceneforge;

namespace {

AssetCatalog catalog_of(std::vector<AssetEntry> entries) { return AssetCatalog{std::move(entries)}; }

OrientedBox box_with_dims(double w, double d, double theta = 0.0) { return {{0, 0}, {0.5 * w, 0.5 * d}, theta}; }

PlacedObject object(int id, const std::string& category, Aabb box, std::optional<int> target = std::nullopt) {
  PlacedObject o;
  o.id = id;
  o.category = category;
  o.box = box;
  o.role = target ? Role::kDependent : Role::kPrimary;
  o.dependency_target = target;
  return o;
}

// Corners of an oriented box computed directly from cos/sin.
std::vector<Vec2> obb_corners(const Aabb& box, double theta) {
  const double c = std::cos(theta * M_PI / 180.0), s = std::sin(theta * M_PI / 180.0);
  const Vec2 m = box.center();
  const double hx = 0.5 * box.width(), hy = 0.5 * box.height();
  std::vector<Vec2> out;
  for (auto [x, y] : {std::pair{-hx, -hy}, {hx, -hy}, {hx, hy}, {-hx, hy}})
    out.push_back({m.x + c * x - s * y, m.y + s * x + c * y});
  return out;
}

// Largest distance from a corner in `a` to its closest corner in `b`, both ways.
double corner_set_distance(std::span<const Vec2> a, std::span<const Vec2> b) {
  double worst = 0.0;
  for (int pass = 0; pass < 2; ++pass) {
    const auto& p = pass ? b : a;
    const auto& q = pass ? a : b;
    for (const Vec2& u : p) {
      double best = INFINITY;
      for (const Vec2& v : q) best = std::min(best, std::hypot(u.x - v.x, u.y - v.y));
      worst = std::max(worst, best);
    }
  }
  return worst;
}

Layout ten_object_fixture() {
  Layout l;
  l.room_bounds = {0, 0, 8, 6};
  l.walls = Room::rectangular(l.room_bounds).walls;
  l.objects = {object(0, "bed", {0.2, 3.5, 2.2, 5.6}),
               object(1, "nightstand", {2.4, 5.0, 2.9, 5.5}),
               object(2, "table", {4, 2, 5.5, 3}),
               object(3, "chair", {3.4, 2.25, 3.9, 2.75}, 2),
               object(4, "chair", {5.6, 2.25, 6.1, 2.75}, 2),
               object(5, "chair", {4.5, 3.1, 5.0, 3.6}, 2),
               object(6, "chair", {4.5, 1.4, 5.0, 1.9}, 2),
               object(7, "desk", {6.5, 5.0, 7.9, 5.8}),
               object(8, "lamp", {7.5, 0.1, 7.9, 0.5}),
               object(9, "couch", {0.3, 0.2, 2.5, 1.1})};
  return l;
}

AssetCatalog exact_catalog(const Layout& layout) {
  AssetCatalog c;
  for (const auto& o : layout.objects)
    c.entries.push_back({"asset_" + std::to_string(o.id), o.category, o.box.width(), o.box.height(),
                         std::fmod(37.0 * o.id, 360.0)});
  return c;
}

}  // namespace

TEST_CASE("retrieval by footprint") {
  auto c = catalog_of({{"a", "table", 1.0, 0.5, 0}, {"b", "table", 2.0, 2.0, 0}});
  Retrieval r = retrieve(box_with_dims(1.0, 0.5), "table", c);
  CHECK(r.entry->asset_id == "a");
  CHECK(r.distance == 0.0);
  CHECK_FALSE(r.swapped);

  r = retrieve(box_with_dims(0.5, 1.0), "table", c);
  CHECK(r.entry->asset_id == "a");
  CHECK(r.distance == 0.0);
  CHECK(r.swapped);

  c = catalog_of({{"big", "stool", 1.3, 1.3, 0}, {"small", "stool", 0.8, 0.8, 0}});
  r = retrieve(box_with_dims(1.0, 1.0), "stool", c);
  CHECK(r.entry->asset_id == "small");
  CHECK(r.distance == doctest::Approx(std::sqrt(0.08)).epsilon(1e-12));

  c = catalog_of({{"z", "lamp", 0.4, 0.4, 0}, {"m", "lamp", 0.4, 0.4, 90}, {"q", "lamp", 0.4, 0.4, 0}});
  CHECK(retrieve(box_with_dims(0.5, 0.5), "lamp", c).entry->asset_id == "m");

  try {
    retrieve(box_with_dims(1, 1), "piano", c);
    FAIL("expected CategoryMissing");
  } catch (const CategoryMissing& e) {
    CHECK(std::string(e.what()).find("lamp") != std::string::npos);
  }
}

TEST_CASE("region boundaries") {
  Layout l;
  l.room_bounds = {-5, -5, 5, 5};
  l.objects = {object(0, "bed", {1, 1, 3, 3}), object(1, "table", {0, 0, 2, 2}),
               object(2, "chair", {-1, 0, -0.5, 1}, 1), object(3, "chair", {2.5, 0, 3, 1}, 1),
               object(4, "lamp", {0, 0, 0.2, 0.2}), object(5, "stool", {0.5, -1, 0.7, -0.8}, 4)};
  CHECK(region_boundary(l.objects[0], l) == l.room_bounds);
  CHECK(region_boundary(l.objects[2], l) == Aabb{-1, 0, 3, 2});
  CHECK(region_boundary(l.objects[3], l) == Aabb{-1, 0, 3, 2});
  CHECK(region_boundary(l.objects[5], l) == Aabb{0, -1, 0.7, 0.2});
  PlacedObject dangling = object(9, "chair", {0, 0, 1, 1}, 42);
  CHECK_THROWS_AS(region_boundary(dangling, l), FormatError);
}

TEST_CASE("facing resolution") {
  const Aabb region{0, 0, 4, 2};
  const OrientedBox chair{{0.25, 1.0}, {0.25, 0.25}, 90.0};
  const double heading = resolve_facing(chair, region, 0.0);
  const Vec2 f = heading_vector(heading);
  CHECK(f.x == doctest::Approx(1.0));
  CHECK(f.y == doctest::Approx(0.0).epsilon(1e-12));

  const OrientedBox centered{{2.0, 1.0}, {0.25, 0.25}, 30.0};
  CHECK(resolve_facing(centered, Aabb{0, -1, 4, 3}, 10.0) == doctest::Approx(40.0));
  CHECK(away_from_boundary({2, 2}, {0, 0, 4, 4}) == Vec2{});

  // Mirroring the region about the object's center flips the choice.
  const OrientedBox off{{1.0, 1.0}, {0.3, 0.2}, 60.0};
  const Aabb near_left{0.2, 0, 5, 2};
  const Aabb mirrored{2 - 5, 0, 2 - 0.2, 2};
  const double a = resolve_facing(off, near_left, 0.0), b = resolve_facing(off, mirrored, 0.0);
  CHECK(half_turn_distance(a, b) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(std::abs(reduce_full_turn(a - b) - 180.0) < 1e-9);
}

TEST_CASE("facing invariants over random inputs") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 1000; ++i) {
    const Aabb region{-u(rng) * 3, -u(rng) * 3, u(rng) * 3 + 0.1, u(rng) * 3 + 0.1};
    const OrientedBox obb{{region.x_min + u(rng) * region.width(), region.y_min + u(rng) * region.height()},
                          {0.2, 0.1},
                          5.0 * std::floor(u(rng) * 36)};
    const double front = std::floor(u(rng) * 360);
    const double heading = resolve_facing(obb, region, front);
    CHECK(heading >= 0.0);
    CHECK(heading < 360.0);
    CHECK(half_turn_distance(heading - front, obb.theta) < 1e-9);
    CHECK(dot(heading_vector(heading), away_from_boundary(obb.center, region)) >= -1e-12);
  }
}

TEST_CASE("assembly scales and places exactly") {
  Layout single;
  single.room_bounds = {0, 0, 4, 4};
  single.objects = {object(0, "desk", {1, 1, 2, 1.5})};
  AssembledScene s = assemble(single, {{0, 0.0}}, catalog_of({{"d", "desk", 2.0, 1.0, 0}}));
  REQUIRE(s.placements.size() == 1);
  CHECK(s.placements[0].scale.x == doctest::Approx(0.5));
  CHECK(s.placements[0].scale.y == doctest::Approx(0.5));
  CHECK_THROWS_AS(assemble(single, {}, catalog_of({{"d", "desk", 2.0, 1.0, 0}})), FormatError);
  CHECK_THROWS_AS(assemble(single, {{0, 0.0}}, catalog_of({{"b", "bed", 2.0, 1.0, 0}})), CategoryMissing);

  const Layout l = ten_object_fixture();
  std::map<int, double> thetas;
  for (const auto& o : l.objects) thetas[o.id] = 5.0 * ((o.id * 7) % 36);
  const AssetCatalog c = exact_catalog(l);
  s = assemble(l, thetas, c);
  REQUIRE(s.placements.size() == 10);
  for (std::size_t i = 0; i < 10; ++i) {
    const Placement& p = s.placements[i];
    const auto e = *std::find_if(c.entries.begin(), c.entries.end(),
                                 [&](const AssetEntry& x) { return x.asset_id == p.asset_id; });
    CHECK(e.category == l.objects[i].category);
    CHECK(p.scale.x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.scale.y == doctest::Approx(1.0).epsilon(1e-12));
    const auto placed = placed_footprint(p, e);
    CHECK(corner_set_distance(placed, obb_corners(l.objects[i].box, thetas[l.objects[i].id])) < 1e-6);
    CHECK(half_turn_distance(p.rotation, thetas[l.objects[i].id]) < 1e-9);
  }

  // Swapped retrieval still reproduces the footprint.
  Layout swapped = single;
  s = assemble(swapped, {{0, 25.0}}, catalog_of({{"d", "desk", 0.55, 1.1, 0}}));
  CHECK(s.placements[0].swapped);
  CHECK(corner_set_distance(placed_footprint(s.placements[0], {"d", "desk", 0.55, 1.1, 0}),
                            obb_corners(single.objects[0].box, 25.0)) < 1e-9);

  // Same inputs, same choices.
  CHECK(to_json(assemble(l, thetas, c)) == to_json(assemble(l, thetas, c)));
}

TEST_CASE("catalog and scene files") {
  const AssetCatalog c = catalog_of({{"a", "chair", 0.5, 0.5, 90}, {"b", "bed", 2, 1.6, 0}});
  CHECK(catalog_from_json(to_json(c)).entries == c.entries);
  CHECK_THROWS_AS(catalog_from_json(to_json(catalog_of({{"a", "Chair", 0.5, 0.5, 0}}))), FormatError);
  CHECK_THROWS_AS(catalog_from_json(to_json(catalog_of({{"a", "chair", 0, 0.5, 0}}))), FormatError);
  CHECK_THROWS_AS(catalog_from_json(to_json(catalog_of({{"a", "chair", 1, 0.5, 360}}))), FormatError);
  CHECK_THROWS_AS(catalog_from_json(Json::parse("{\"entries\": [{\"asset_id\": \"a\"}]}")), FormatError);

  const Layout l = ten_object_fixture();
  std::map<int, double> thetas;
  for (const auto& o : l.objects) thetas[o.id] = 15.0;
  const AssembledScene s = assemble(l, thetas, exact_catalog(l));
  CHECK(assembled_scene_from_json(to_json(s)).placements == s.placements);
  CHECK(thetas_from_json(thetas_to_json(thetas)) == thetas);
  CHECK_THROWS_AS(thetas_from_json(Json::parse("{\"thetas\": {\"x\": 1}}")), FormatError);
}
