#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "sceneforge/compression.hpp"
#include "sceneforge/dsl.hpp"
#include "sceneforge/error.hpp"
#include "sceneforge/interp.hpp"
#include "sceneforge/library.hpp"
#include "sceneforge/verify.hpp"

using namespace sceneforge;

namespace {

const Room kRoom = Room::rectangular({-20, -20, 20, 20});

dsl::FuncDef parse_def(const std::string& text) {
  const dsl::Program p = dsl::parse(text);
  REQUIRE(p.defs.size() == 1);
  return p.defs[0];
}

std::string parallel_row(double x, double y, double step) {
  std::string s = "chair_1 = furniture(" + dsl::format_number(x) + ", " + dsl::format_number(y) + ", " +
                  dsl::format_number(x + 0.5) + ", " + dsl::format_number(y + 0.5) + ")\n";
  for (int i = 2; i <= 5; ++i) {
    s += "chair_" + std::to_string(i) + " = parallel(chair_" + std::to_string(i - 1) + ", " +
         dsl::format_number(step) + ", 4)\n";
  }
  s += "bed_1 = furniture(5, 5, 7, 7.5)\n";
  return s;
}

}  // namespace

TEST_CASE("bootstrap and standard libraries") {
  const Library boot = Library::bootstrap();
  CHECK(boot.builtins == std::set<std::string>{"furniture", "parallel"});
  CHECK(boot.functions.empty());
  CHECK(Library::standard().builtins.size() == 7);
  CHECK_THROWS_AS(boot.with_function(parse_def("def grid(a) {\n    return a\n}")), Error);
}

TEST_CASE("library text round trip") {
  const dsl::FuncDef def = parse_def(
      "def repeat_row(x, y, n, dx) {\n"
      "    for i in 0..n {\n"
      "        obj = furniture(x + i * dx, y, x + i * dx + 1, y + 1)\n"
      "    }\n"
      "    return obj\n"
      "}\n");
  const Library lib = Library::bootstrap().with_function(def);
  CHECK(lib.version == 1);
  const std::string text = serialize_library(lib);
  CHECK(text.rfind("# scenelib v1\n# builtins furniture parallel\n", 0) == 0);
  CHECK(parse_library(text) == lib);
  CHECK_THROWS_AS(parse_library("not a library"), FormatError);
  CHECK_THROWS_AS(parse_library("# scenelib v1\na = furniture(0, 0, 1, 1)\n"), FormatError);
}

TEST_CASE("description length is additive") {
  const dsl::Program a = dsl::parse("b_1 = furniture(0,0,1,1)\nc_1 = parallel(b_1, 2, 4)");
  const dsl::Program b = dsl::parse("d_1 = furniture(3,3,4,5)");
  dsl::Program both = a;
  both.statements.insert(both.statements.end(), b.statements.begin(), b.statements.end());
  CHECK(dsl::description_length(both) == dsl::description_length(a) + dsl::description_length(b));
  CHECK(dsl::description_length(dsl::Program{}) == 0);
}

TEST_CASE("funcs_per_program") {
  const std::vector<dsl::Program> plain{dsl::parse("a = furniture(0,0,1,1)"), dsl::parse("b = furniture(0,0,2,2)")};
  CHECK(funcs_per_program(plain) == 0.0);
  const std::vector<dsl::Program> mixed{dsl::parse(
      "a_1 = furniture(0,0,1,1)\na_2 = grid(a_1, 2, 2, 1, 1)\n"
      "b_1 = furniture(5,5,6,6)\nb_2 = grid(b_1, 2, 2, 1, 1)\n"
      "c_1 = furniture(9,9,10,10)\nc_2 = align(c_1, 3, 2, 4)")};
  CHECK(funcs_per_program(mixed) == 3.0);
  CHECK_THROWS_AS(funcs_per_program(std::vector<dsl::Program>{}), Error);
}

TEST_CASE("accept_candidate rule") {
  CompressionReport r;
  r.gain = 40;
  r.programs_rewritten = 5;
  CHECK(accept_candidate(r, 10));
  r.programs_rewritten = 1;
  CHECK_FALSE(accept_candidate(r, 10));
  r.gain = 5;
  r.programs_rewritten = 5;
  CHECK_FALSE(accept_candidate(r, 10));
  r.gain = 8;
  CHECK(accept_candidate(r));
}

TEST_CASE("parameter classification") {
  const Library lib = Library::standard();
  const auto kinds = classify_params(parse_def("def f(o, n, d, k) {\n    return align(o, n, d, k)\n}"), lib);
  CHECK(kinds == std::vector<ParamKind>{ParamKind::kObject, ParamKind::kCount, ParamKind::kNumber,
                                         ParamKind::kDirection});
  const auto loop = classify_params(parse_def(
      "def g(x, n) {\n    for i in 0..n {\n        o = furniture(x + i, 0, x + i + 1, 1)\n    }\n    return o\n}"), lib);
  CHECK(loop == std::vector<ParamKind>{ParamKind::kNumber, ParamKind::kCount});
  const auto opaque = classify_params(parse_def("def h(o, offs) {\n    return cluster_placement(o, offs)\n}"), lib);
  CHECK(opaque[1] == ParamKind::kOpaque);
}

TEST_CASE("parallel rows collapse to one call of an align wrapper") {
  const dsl::FuncDef row = parse_def("def row_of(obj, n, d, dir) {\n    return align(obj, n, d, dir)\n}");
  std::vector<dsl::Program> corpus;
  corpus.push_back(dsl::parse(parallel_row(0, 0, 1)));
  corpus.push_back(dsl::parse(parallel_row(-3, 2, 0.75)));
  corpus.push_back(dsl::parse(parallel_row(4, -6, 2.5)));

  const Library lib = Library::standard();
  const RewriteResult out = rewrite_corpus(corpus, row, lib);
  CHECK(out.report.programs_rewritten == 3);
  CHECK(out.report.gain > 0);
  CHECK(out.report.gain == static_cast<long long>(out.report.tokens_before) -
                               static_cast<long long>(out.report.tokens_after) -
                               static_cast<long long>(out.report.definition_cost));
  CHECK(accept_candidate(out.report));

  const Library extended = lib.with_function(row);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    std::size_t row_calls = 0;
    std::size_t parallel_calls = 0;
    for (const dsl::Stmt& s : out.corpus[i].statements) {
      const std::string text = dsl::format(s);
      row_calls += text.find("row_of(") != std::string::npos;
      parallel_calls += text.find("parallel(") != std::string::npos;
    }
    CHECK(row_calls == 1);
    CHECK(parallel_calls == 0);
    const Layout before = execute(corpus[i], lib, kRoom);
    const Layout after = execute(out.corpus[i], extended, kRoom);
    CHECK(verify(before, after) >= kExactMiou);
    CHECK(after.objects.size() == before.objects.size());
  }
}

TEST_CASE("a candidate matching nothing leaves the corpus unchanged") {
  const dsl::FuncDef quad = parse_def(
      "def quad(x, y) {\n    return symmetrical((x, y), 1, 1, (0.3, 0.3))\n}");
  const std::vector<dsl::Program> corpus{dsl::parse(parallel_row(0, 0, 1))};
  const RewriteResult out = rewrite_corpus(corpus, quad, Library::standard());
  CHECK(out.corpus == corpus);
  CHECK(out.report.programs_rewritten == 0);
  CHECK(out.report.gain == -static_cast<long long>(dsl::description_length(quad)));
}

TEST_CASE("a candidate that cannot execute is rejected") {
  const dsl::FuncDef broken = parse_def("def broken(x) {\n    return nowhere(x)\n}");
  const std::vector<dsl::Program> corpus{dsl::parse(parallel_row(0, 0, 1))};
  CHECK_THROWS_AS(rewrite_corpus(corpus, broken, Library::standard()), ExecError);
}

TEST_CASE("loop functions rewrite furniture rows and lattices") {
  const dsl::FuncDef grid_fn = parse_def(
      "def repeat_grid(x_min, y_min, x_max, y_max, rows, cols, dx, dy) {\n"
      "    for r in 0..rows {\n"
      "        for c in 0..cols {\n"
      "            obj = furniture(x_min + c * dx, y_min + r * dy, x_max + c * dx, y_max + r * dy)\n"
      "        }\n"
      "    }\n"
      "    return obj\n"
      "}\n");
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> pos(-5, 5), step(1.0, 2.0);
  std::vector<dsl::Program> corpus;
  for (int k = 0; k < 4; ++k) {
    const double x0 = std::round(pos(rng) * 100) / 100, y0 = std::round(pos(rng) * 100) / 100;
    const double dx = std::round(step(rng) * 100) / 100, dy = std::round(step(rng) * 100) / 100;
    const int rows = 2 + k % 2, cols = 3;
    std::string src;
    int n = 1;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const double x = x0 + c * dx, y = y0 + r * dy;
        src += "desk_" + std::to_string(n++) + " = furniture(" + dsl::format_number(x) + ", " +
               dsl::format_number(y) + ", " + dsl::format_number(x + 0.8) + ", " + dsl::format_number(y + 0.6) + ")\n";
      }
    }
    src += "lamp_1 = furniture(9, 9, 9.5, 9.5)\n";
    corpus.push_back(dsl::parse(src));
  }
  const Library lib = Library::bootstrap();
  const RewriteResult out = rewrite_corpus(corpus, grid_fn, lib);
  CHECK(out.report.programs_rewritten == 4);
  CHECK(out.report.gain > 0);
  const Library extended = lib.with_function(grid_fn);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    CHECK(out.corpus[i].statements.size() == 2);
    CHECK(verify(execute(corpus[i], lib, kRoom), execute(out.corpus[i], extended, kRoom)) >= kExactMiou);
  }
  CHECK(funcs_per_program(out.corpus) > funcs_per_program(corpus));
}

TEST_CASE("growing the library keeps old programs valid") {
  const dsl::Program old = dsl::parse(parallel_row(1, 1, 1));
  Library lib = Library::standard();
  const Layout before = execute(old, lib, kRoom);
  lib = lib.with_function(parse_def("def row_of(obj, n, d, dir) {\n    return align(obj, n, d, dir)\n}"));
  CHECK(execute(old, lib, kRoom) == before);
}
