#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "sceneforge/dsl.hpp"
#include "sceneforge/error.hpp"
#include "sceneforge/interp.hpp"
#include "sceneforge/library.hpp"

using namespace sceneforge;

namespace {

const Room kRoom = Room::rectangular({-10, -10, 10, 10});

Layout run(const std::string& src, const Library& lib = Library::standard()) {
  return execute(dsl::parse(src), lib, kRoom);
}

void check_box(const Aabb& got, const Aabb& want, double tol = 1e-9) {
  CHECK(std::abs(got.x_min - want.x_min) <= tol);
  CHECK(std::abs(got.y_min - want.y_min) <= tol);
  CHECK(std::abs(got.x_max - want.x_max) <= tol);
  CHECK(std::abs(got.y_max - want.y_max) <= tol);
}

void check_center(const Aabb& got, Vec2 want) {
  CHECK(std::abs(got.center().x - want.x) <= 1e-9);
  CHECK(std::abs(got.center().y - want.y) <= 1e-9);
}

}  // namespace

TEST_CASE("execute examples") {
  SUBCASE("one bed") {
    const Layout l = run("bed_1 = furniture(0,0,2,1.6)");
    REQUIRE(l.objects.size() == 1);
    CHECK(l.objects[0].category == "bed");
    CHECK(l.objects[0].role == Role::kPrimary);
    CHECK_FALSE(l.objects[0].dependency_target.has_value());
    CHECK(l.objects[0].box == Aabb{0, 0, 2, 1.6});
    CHECK(l.objects[0].instantiating_call == "furniture(0.0, 0.0, 2.0, 1.6)");
  }
  SUBCASE("parallel is dependent on its anchor") {
    const Layout l = run("t_1 = furniture(0,0,2,2)\nc = parallel(t_1, 4, 4)");
    REQUIRE(l.objects.size() == 2);
    CHECK(l.objects[1].role == Role::kDependent);
    CHECK(l.objects[1].dependency_target == 0);
    CHECK(l.objects[1].category == "c");
    check_box(l.objects[1].box, {4, 0, 6, 2});
  }
  SUBCASE("identity grid replaces its template") {
    const Layout l = run("t_1 = furniture(1,2,3,5)\ng = grid(t_1, 1, 1, 7, 7)");
    REQUIRE(l.objects.size() == 1);
    CHECK(l.objects[0].box == Aabb{1, 2, 3, 5});
    CHECK(l.objects[0].category == "g");
  }
}

TEST_CASE("parallel examples") {
  check_box(stdlib::parallel({0, 0, 2, 2}, 4, 4), {4, 0, 6, 2});
  check_box(stdlib::parallel({0, 0, 2, 2}, 0, 1, stdlib::Size{2, 2}), {0, 0, 2, 2});
  check_box(stdlib::parallel({0, 0, 2, 2}, 3, 2, stdlib::Size{1, 1}), {0.5, -2.5, 1.5, -1.5});
  CHECK_THROWS_AS(stdlib::parallel({0, 0, 2, 2}, 1, 5), ExecError);
  CHECK_THROWS_AS(stdlib::parallel({0, 0, 2, 2}, 1, 1, stdlib::Size{0, 1}), ExecError);
}

TEST_CASE("align examples") {
  const auto one = stdlib::align({0, 0, 1, 1}, 1, 5, 3);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == Aabb{0, 0, 1, 1});

  const auto row = stdlib::align({0, 0, 1, 1}, 3, 2, 4);
  REQUIRE(row.size() == 3);
  for (int i = 0; i < 3; ++i) check_box(row[static_cast<std::size_t>(i)], {2.0 * i, 0, 2.0 * i + 1, 1});

  const auto same = stdlib::align({0, 0, 1, 1}, 2, 0, 1);
  REQUIRE(same.size() == 2);
  CHECK(same[0] == same[1]);
  CHECK_THROWS_AS(stdlib::align({0, 0, 1, 1}, 0, 1, 1), ExecError);
}

TEST_CASE("grid examples") {
  const Aabb unit = Aabb::from_center({0, 0}, 1, 1);
  const auto id = stdlib::grid(unit, 1, 1, 3, 3);
  REQUIRE(id.size() == 1);
  CHECK(id[0] == unit);

  const auto pair = stdlib::grid(unit, 1, 2, 4, 0);
  REQUIRE(pair.size() == 2);
  check_center(pair[0], {-2, 0});
  check_center(pair[1], {2, 0});

  const auto square = stdlib::grid(unit, 2, 2, 2, 2);
  REQUIRE(square.size() == 4);
  check_center(square[0], {-1, 1});
  check_center(square[1], {1, 1});
  check_center(square[2], {-1, -1});
  check_center(square[3], {1, -1});
  CHECK_THROWS_AS(stdlib::grid(unit, 0, 2, 1, 1), ExecError);
}

TEST_CASE("grid_with_offset examples") {
  const Aabb unit = Aabb::from_center({0, 0}, 1, 1);
  const std::vector<double> one{1.0};
  const auto shifted = stdlib::grid_with_offset(unit, 1, 2, 4, 0, one, {});
  REQUIRE(shifted.size() == 2);
  check_center(shifted[0], {-1, 0});
  check_center(shifted[1], {3, 0});

  const std::vector<double> half{0.5};
  const auto col = stdlib::grid_with_offset(unit, 2, 1, 0, 2, {}, half);
  REQUIRE(col.size() == 2);
  check_center(col[0], {0, 1.5});
  check_center(col[1], {0, -0.5});

  const std::vector<double> wrong{1.0, 2.0};
  CHECK_THROWS_AS(stdlib::grid_with_offset(unit, 1, 2, 1, 1, wrong, {}), ExecError);
}

TEST_CASE("symmetrical examples") {
  const auto four = stdlib::symmetrical({0, 0}, 2, 1, {1, 1});
  REQUIRE(four.size() == 4);
  check_center(four[0], {2, 1});
  check_center(four[1], {2, -1});
  check_center(four[2], {-2, 1});
  check_center(four[3], {-2, -1});

  const auto flat = stdlib::symmetrical({3, 4}, 0, 0, {1, 2});
  for (const Aabb& b : flat) CHECK(b == Aabb::from_center({3, 4}, 1, 2));
  CHECK_THROWS_AS(stdlib::symmetrical({0, 0}, 1, 1, {-1, 1}), ExecError);

  const Layout l = run("s = symmetrical((0, 0), 2, 1, (1, 1))");
  REQUIRE(l.objects.size() == 4);
  for (const PlacedObject& o : l.objects) CHECK(o.role == Role::kPrimary);
}

TEST_CASE("symmetrical output is closed under reflection about the center") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-3, 3), s(0.1, 2);
  for (int i = 0; i < 100; ++i) {
    const Vec2 c{u(rng), u(rng)};
    const auto boxes = stdlib::symmetrical(c, u(rng), u(rng), {s(rng), s(rng)});
    for (const Aabb& b : boxes) {
      const Vec2 mirrored = 2.0 * c - b.center();
      bool found = false;
      for (const Aabb& o : boxes) found = found || norm(o.center() - mirrored) <= 1e-9;
      CHECK(found);
    }
  }
}

TEST_CASE("cluster_placement examples") {
  const std::vector<Vec2> zero{{0, 0}};
  const auto same = stdlib::cluster_placement({0.5, 0.5, 1.5, 1.5}, zero);
  REQUIRE(same.size() == 1);
  CHECK(same[0] == Aabb{0.5, 0.5, 1.5, 1.5});

  const std::vector<Vec2> sides{{-2, 0}, {2, 0}};
  const auto pair = stdlib::cluster_placement({0, 0, 2, 2}, sides, stdlib::Size{1, 1});
  REQUIRE(pair.size() == 2);
  check_center(pair[0], {-1, 1});
  check_center(pair[1], {3, 1});
  CHECK_THROWS_AS(stdlib::cluster_placement({0, 0, 2, 2}, {}), ExecError);

  const Layout ring = run(
      "table_1 = furniture(-1, -1, 1, 1)\n"
      "chair = cluster_placement(table_1, [(0, 1.5), (0, -1.5), (1.5, 0), (-1.5, 0)], (0.5, 0.5))");
  REQUIRE(ring.objects.size() == 5);
  const Vec2 expected[] = {{0, 1.5}, {0, -1.5}, {1.5, 0}, {-1.5, 0}};
  for (int i = 0; i < 4; ++i) {
    const PlacedObject& o = ring.objects[static_cast<std::size_t>(i + 1)];
    CHECK(o.role == Role::kDependent);
    CHECK(o.dependency_target == 0);
    CHECK(o.category == "chair");
    check_center(o.box, expected[i]);
  }
}

TEST_CASE("reduction laws over randomized inputs") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> pos(-50, 50), ext(0.05, 5), dist(0, 10);
  std::uniform_int_distribution<int> dir(1, 4), count(1, 6);
  for (int i = 0; i < 1000; ++i) {
    const Aabb ref = Aabb::from_center({pos(rng), pos(rng)}, ext(rng), ext(rng));
    const double h = dist(rng), v = dist(rng);

    const auto g = stdlib::grid(ref, 1, 1, h, v);
    REQUIRE(g.size() == 1);
    CHECK(g[0] == ref);

    const int rows = count(rng), cols = count(rng);
    const std::vector<double> zr(static_cast<std::size_t>(rows), 0.0), zc(static_cast<std::size_t>(cols), 0.0);
    CHECK(stdlib::grid_with_offset(ref, rows, cols, h, v, zr, zc) == stdlib::grid(ref, rows, cols, h, v));

    const Aabb p = stdlib::parallel(ref, 0, dir(rng));
    CHECK(p.center() == ref.center());

    const auto a = stdlib::align(ref, 1, dist(rng), dir(rng));
    REQUIRE(a.size() == 1);
    CHECK(a[0] == ref);
  }
}

TEST_CASE("templates are consumed by align and grid") {
  const Layout l = run(
      "chair_1 = furniture(0, 0, 1, 1)\n"
      "chair_2 = align(chair_1, 3, 2, 4)\n"
      "desk_1 = furniture(5, 5, 7, 6)\n"
      "lamp = parallel(desk_1, 1, 1)");
  REQUIRE(l.objects.size() == 5);
  for (int i = 0; i < 3; ++i) {
    CHECK(l.objects[static_cast<std::size_t>(i)].category == "chair");
    CHECK(l.objects[static_cast<std::size_t>(i)].role == Role::kPrimary);
    CHECK(l.objects[static_cast<std::size_t>(i)].instantiating_call == "align(chair_1, 3.0, 2.0, 4.0)");
  }
  CHECK(l.objects[4].dependency_target == 3);

  // A reference that is used elsewhere stays in the layout.
  const Layout kept = run(
      "chair_1 = furniture(0, 0, 1, 1)\n"
      "chair_2 = align(chair_1, 2, 2, 4)\n"
      "chair_3 = parallel(chair_1, 3, 1)");
  CHECK(kept.objects.size() == 4);
  CHECK(kept.objects[1].role == Role::kDependent);
  CHECK(kept.objects[1].dependency_target == 0);
}

TEST_CASE("user defined functions with loops") {
  const std::string src =
      "def repeat_row(x, y, n, dx) {\n"
      "    for i in 0..n {\n"
      "        obj = furniture(x + i * dx, y, x + i * dx + 1, y + 1)\n"
      "    }\n"
      "    return obj\n"
      "}\n"
      "chair_1 = repeat_row(0, 0, 4, 1.5)\n";
  const Layout l = run(src);
  REQUIRE(l.objects.size() == 4);
  for (int i = 0; i < 4; ++i) {
    check_box(l.objects[static_cast<std::size_t>(i)].box, {1.5 * i, 0, 1.5 * i + 1, 1});
    CHECK(l.objects[static_cast<std::size_t>(i)].category == "chair");
  }

  const dsl::Program p = dsl::parse(src);
  const std::vector<Argument> args{{0.0}, {0.0}, {2.0}, {3.0}};
  const auto boxes = evaluate_function(p.defs[0], args, Library::standard());
  REQUIRE(boxes.size() == 2);
  check_box(boxes[1], {3, 0, 4, 1});
}

TEST_CASE("library functions resolve and consume their reference") {
  const dsl::Program defs = dsl::parse(
      "def pair_row(obj, d) {\n"
      "    return align(obj, 2, d, 4)\n"
      "}\n");
  const Library lib = Library::standard().with_function(defs.defs[0]);
  CHECK(consumes_reference("pair_row", lib));
  const Layout l = run("stool_1 = furniture(0, 0, 1, 1)\nstool_2 = pair_row(stool_1, 3)", lib);
  REQUIRE(l.objects.size() == 2);
  check_box(l.objects[1].box, {3, 0, 4, 1});
}

TEST_CASE("execution errors") {
  CHECK_THROWS_AS(run("a = furniture(0, 0, 1)"), ExecError);
  CHECK_THROWS_AS(run("a = furniture(1, 0, 0, 1)"), ExecError);
  CHECK_THROWS_AS(run("a = nothing(1)"), ExecError);
  CHECK_THROWS_AS(run("a = furniture(0, 0, 1, 1)\nb = align(a, 2.5, 1, 1)"), ExecError);
  CHECK_THROWS_AS(run("a = furniture(0, 0, 1, 1)\nb = parallel(a, 1, 7)"), ExecError);
  CHECK_THROWS_AS(run("a = furniture(0, 0, 1, 1)\nb = align(a, 2, 1, 1)", Library::bootstrap()), ExecError);
  CHECK_THROWS_AS(run("a = 1 / 0"), ExecError);
  CHECK_THROWS_AS(run("def f(n) {\n    return f(n)\n}\na = f(1)"), ExecError);
  CHECK_THROWS_AS(run("def f(n) {\n    for i in 0..n {\n        o = furniture(0, 0, 1, 1)\n    }\n    return o\n}\na = f(0.5)"),
                  ExecError);
}

namespace {

// Random stdlib-only program text with furniture literals shifted by (dx, dy).
std::string random_program(std::mt19937_64& rng, double dx, double dy) {
  std::uniform_real_distribution<double> pos(-5, 5), ext(0.2, 2), dist(0.5, 3);
  std::uniform_int_distribution<int> kind(0, 5), dir(1, 4), cnt(1, 4);
  std::string out;
  const auto lit = [&](double cx, double cy, double w, double h) {
    return "furniture(" + dsl::format_number(cx - w / 2 + dx) + ", " + dsl::format_number(cy - h / 2 + dy) +
           ", " + dsl::format_number(cx + w / 2 + dx) + ", " + dsl::format_number(cy + h / 2 + dy) + ")";
  };
  const int n = 1 + static_cast<int>(rng() % 4);
  for (int i = 0; i < n; ++i) {
    static const char* kinds[] = {"sofa", "desk", "shelf", "stool"};
    const std::string ref = std::string(kinds[i]) + "_1";
    out += ref + " = " + lit(pos(rng), pos(rng), ext(rng), ext(rng)) + "\n";
    const std::string next = std::string(kinds[i]) + "_2";
    switch (kind(rng)) {
      case 0: out += next + " = parallel(" + ref + ", " + dsl::format_number(dist(rng)) + ", " + std::to_string(dir(rng)) + ")\n"; break;
      case 1: out += next + " = align(" + ref + ", " + std::to_string(cnt(rng)) + ", " + dsl::format_number(dist(rng)) + ", " + std::to_string(dir(rng)) + ")\n"; break;
      case 2: out += next + " = grid(" + ref + ", " + std::to_string(cnt(rng)) + ", " + std::to_string(cnt(rng)) + ", " + dsl::format_number(dist(rng)) + ", " + dsl::format_number(dist(rng)) + ")\n"; break;
      case 3: out += next + " = cluster_placement(" + ref + ", [(1, 0), (0, 1)])\n"; break;
      case 4: out += next + " = symmetrical((" + dsl::format_number(pos(rng) + dx) + ", " + dsl::format_number(pos(rng) + dy) + "), 1, 2, (0.5, 0.5))\n"; break;
      default: break;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("execution is deterministic and provenance is sound") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 200; ++i) {
    const dsl::Program p = dsl::parse(random_program(rng, 0, 0));
    const Layout a = execute(p, Library::standard(), kRoom);
    const Layout b = execute(p, Library::standard(), kRoom);
    CHECK(a == b);
    for (std::size_t k = 0; k < a.objects.size(); ++k) {
      const PlacedObject& o = a.objects[k];
      CHECK(o.id == static_cast<int>(k));
      CHECK((o.role == Role::kDependent) == o.dependency_target.has_value());
      if (o.dependency_target) CHECK(*o.dependency_target < o.id);
      CHECK_NOTHROW(dsl::parse_expression(o.instantiating_call));
    }
  }
}

TEST_CASE("translation equivariance") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const double dx = 0.25 * static_cast<double>(seed % 7) - 1.0, dy = 0.5 * static_cast<double>(seed % 5) - 1.0;
    std::mt19937_64 r1(seed), r2(seed);
    const Layout base = execute(dsl::parse(random_program(r1, 0, 0)), Library::standard(), kRoom);
    const Layout moved = execute(dsl::parse(random_program(r2, dx, dy)), Library::standard(), kRoom);
    REQUIRE(base.objects.size() == moved.objects.size());
    for (std::size_t k = 0; k < base.objects.size(); ++k) {
      const Aabb& a = base.objects[k].box;
      const Aabb& b = moved.objects[k].box;
      CHECK(std::abs(b.x_min - a.x_min - dx) <= 1e-9);
      CHECK(std::abs(b.y_min - a.y_min - dy) <= 1e-9);
      CHECK(std::abs(b.x_max - a.x_max - dx) <= 1e-9);
      CHECK(std::abs(b.y_max - a.y_max - dy) <= 1e-9);
    }
  }
}
