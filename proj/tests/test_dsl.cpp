#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "sceneforge/dsl.hpp"
#include "sceneforge/error.hpp"

using namespace sceneforge;
using namespace sceneforge::dsl;

namespace {

// Random well-formed programs: a few defs with loops, then top-level
// statements that only reference names bound earlier.
class ProgramGen {
 public:
  explicit ProgramGen(std::uint64_t seed) : rng_(seed) {}

  Program program() {
    Program p;
    const int n_defs = pick(0, 2);
    for (int i = 0; i < n_defs; ++i) p.defs.push_back(def("fn_" + std::to_string(i)));
    std::vector<std::string> bound;
    const int n = pick(1, 8);
    for (int i = 0; i < n; ++i) {
      const std::string name = category() + "_" + std::to_string(i + 1);
      if (pick(0, 5) == 0) {
        p.statements.push_back(Stmt{ExprStmt{expr(bound, 3)}});
      } else {
        p.statements.push_back(assign(name, expr(bound, 3)));
        bound.push_back(name);
      }
    }
    return p;
  }

 private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  double number() {
    switch (pick(0, 3)) {
      case 0: return pick(-20, 20);
      case 1: return pick(-2000, 2000) / 100.0;
      case 2: return std::uniform_real_distribution<double>(-1e3, 1e3)(rng_);
      default: return std::uniform_real_distribution<double>(-1, 1)(rng_) * 1e-7;
    }
  }

  std::string category() {
    static const char* names[] = {"chair", "table", "coffee_table", "bed", "tv_stand", "x"};
    return names[pick(0, 5)];
  }

  Expr expr(const std::vector<std::string>& bound, int depth) {
    const int k = depth <= 0 ? pick(0, 1) : pick(0, 5);
    switch (k) {
      case 0: return num(number());
      case 1:
        if (!bound.empty()) return var(bound[static_cast<std::size_t>(pick(0, static_cast<int>(bound.size()) - 1))]);
        return num(number());
      case 2: {
        std::vector<Expr> items;
        const int n = pick(1, 3);
        for (int i = 0; i < n; ++i) items.push_back(expr(bound, depth - 1));
        return tuple(std::move(items));
      }
      case 3: {
        std::vector<Expr> items;
        const int n = pick(0, 3);
        for (int i = 0; i < n; ++i) items.push_back(expr(bound, depth - 1));
        return list(std::move(items));
      }
      case 4: {
        static const BinaryOp ops[] = {BinaryOp::kAdd, BinaryOp::kSub, BinaryOp::kMul, BinaryOp::kDiv};
        return binop(ops[pick(0, 3)], expr(bound, depth - 1), expr(bound, depth - 1));
      }
      default: {
        static const char* callees[] = {"furniture", "parallel", "grid", "align", "anything"};
        std::vector<Expr> args;
        const int n = pick(0, 4);
        for (int i = 0; i < n; ++i) args.push_back(expr(bound, depth - 1));
        return call(callees[pick(0, 4)], std::move(args));
      }
    }
  }

  FuncDef def(const std::string& name) {
    FuncDef f;
    f.name = name;
    const int n_params = pick(1, 4);
    for (int i = 0; i < n_params; ++i) f.params.push_back("p_" + std::to_string(i));
    std::vector<std::string> bound = f.params;
    RangeFor loop;
    loop.var = "i";
    loop.lo = num(0);
    loop.hi = var(f.params[0]);
    std::vector<std::string> inner = bound;
    inner.push_back("i");
    loop.body.push_back(assign("obj", expr(inner, 2)));
    f.body.push_back(Stmt{std::move(loop)});
    bound.push_back("obj");
    f.body.push_back(Stmt{Return{expr(bound, 2)}});
    return f;
  }

  std::mt19937_64 rng_;
};

}  // namespace

TEST_CASE("parse smallest program") {
  const Program p = parse("bed_1 = furniture(0.0, 0.0, 2.0, 1.6)");
  REQUIRE(p.statements.size() == 1);
  const auto& a = std::get<Assign>(p.statements[0].node);
  CHECK(a.name == "bed_1");
  const auto& c = std::get<Call>(a.value.node);
  CHECK(c.callee == "furniture");
  REQUIRE(c.args.size() == 4);
  CHECK(std::get<Number>(c.args[3].node).value == 1.6);
}

TEST_CASE("parse nested literal structure") {
  const Program p = parse("t_1 = furniture(0,0,1,1)\nc = cluster_placement(t_1, [(-0.6,0.0)], (0.5,0.5))");
  REQUIRE(p.statements.size() == 2);
  const auto& c = std::get<Call>(std::get<Assign>(p.statements[1].node).value.node);
  REQUIRE(c.args.size() == 3);
  CHECK(std::get<Var>(c.args[0].node).name == "t_1");
  const auto& offsets = std::get<ListLit>(c.args[1].node);
  REQUIRE(offsets.items.size() == 1);
  const auto& off = std::get<Tuple>(offsets.items[0].node);
  CHECK(std::get<Number>(off.items[0].node).value == -0.6);
  CHECK(std::get<Tuple>(c.args[2].node).items.size() == 2);
}

TEST_CASE("arity is not checked by the parser") {
  CHECK_NOTHROW(parse("bed_1 = furniture(0,0,1)"));
}

TEST_CASE("canonical format") {
  CHECK(format(parse("bed_1 = furniture(0.0, 0.0, 2.0, 1.6)")) == "bed_1 = furniture(0.0, 0.0, 2.0, 1.6)\n");
  CHECK(format(parse("bed_1   =furniture( 0,0 ,2,\n 1.6)  # comment")) ==
        "bed_1 = furniture(0.0, 0.0, 2.0, 1.6)\n");
  CHECK(format_number(2.0) == "2.0");
  CHECK(format_number(-3.0) == "-3.0");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.25) == "1.25");
  CHECK(format(parse_expression("[(1, [2, (3,)]), []]")) == "[(1.0, [2.0, (3.0,)]), []]");
  CHECK(format(parse_expression("(a + b) * c - (d - e)")) == "(a + b) * c - (d - e)");
}

TEST_CASE("defs and loops") {
  const std::string src =
      "def repeat_row(x, n, dx) {\n"
      "    for i in 0.0..n {\n"
      "        obj = furniture(x + i * dx, 0.0, x + i * dx + 1.0, 1.0)\n"
      "    }\n"
      "    return obj\n"
      "}\n"
      "chair = repeat_row(0.0, 3.0, 2.0)\n";
  const Program p = parse(src);
  REQUIRE(p.defs.size() == 1);
  CHECK(p.defs[0].params == std::vector<std::string>{"x", "n", "dx"});
  CHECK(std::holds_alternative<RangeFor>(p.defs[0].body[0].node));
  CHECK(format(p) == src);
}

TEST_CASE("category extraction") {
  CHECK(category_of("chair_12") == "chair");
  CHECK(category_of("coffee_table_1") == "coffee_table");
  CHECK(category_of("coffee_table") == "coffee_table");
  CHECK(is_valid_variable_name("chair_2"));
  CHECK_FALSE(is_valid_variable_name("Chair"));
  CHECK_FALSE(is_valid_variable_name("chair2"));
  CHECK_FALSE(is_valid_variable_name("2chair"));
}

TEST_CASE("description length counts tokens of canonical text") {
  // b_1 = furniture ( 0.0 , 0.0 , 1.0 , 1.0 ) -> closing bracket free
  CHECK(description_length(parse("b_1 = furniture(0,0,1,1)")) == 11);
  CHECK(description_length(parse("b_1 = furniture(0,0,1,1)\nb_2 = furniture(0,0,1,1)")) == 22);
  CHECK(description_length(parse("x = [(1, 2)]")) == 7);
}

TEST_CASE("syntax errors carry positions") {
  const auto position = [](const std::string& src) -> std::pair<int, int> {
    try {
      parse(src);
    } catch (const SyntaxError& e) {
      return {e.line(), e.column()};
    }
    return {0, 0};
  };
  CHECK(position("a_1 = furniture(0,0,1,1)\nb_1 = furniture(0,0,1,1") != std::pair<int, int>{0, 0});
  CHECK(position("a_1 = furniture(0,0,1,1)\nb_1 = $").first == 2);
  CHECK(position("a_1 = furniture(0,0,1,1)\nb_1 = $") == std::pair<int, int>{2, 7});
  CHECK(position("x = y") == std::pair<int, int>{1, 5});
  CHECK(position("x = 1\nx = 2").first == 2);
  CHECK(position("Bad = 1").first == 1);
  CHECK(position("for i in 0..3 { a = 1 }").first == 1);
}

TEST_CASE("round trip on generated programs") {
  ProgramGen gen(99);
  for (int i = 0; i < 400; ++i) {
    const Program p = gen.program();
    const std::string text = format(p);
    Program q;
    REQUIRE_NOTHROW(q = parse(text));
    CHECK(q == p);
    CHECK(format(q) == text);
  }
}

TEST_CASE("parse is idempotent through format on hand-written sources") {
  const char* sources[] = {
      "a = 1 + 2 * 3 - 4 / 5",
      "a = -1\nb = -a\nc = 2 - -3",
      "t_1 = furniture(0,0,1,1)\nc = grid(t_1, 2, 3, 1.5, 2.25)",
      "x = ((1, 2), [3, 4], (5,))",
  };
  for (const char* s : sources) {
    const Program p = parse(s);
    CHECK(parse(format(p)) == p);
  }
}

TEST_CASE("fuzzed input only raises domain errors") {
  std::mt19937_64 rng(7);
  const std::string alphabet = "abc_xyz0123456789()[],.=+-*/#{} \n\t.";
  for (int i = 0; i < 3000; ++i) {
    std::string s;
    const int n = std::uniform_int_distribution<int>(0, 60)(rng);
    for (int k = 0; k < n; ++k) {
      if (i % 3 == 0) {
        s.push_back(static_cast<char>(std::uniform_int_distribution<int>(0, 255)(rng)));
      } else {
        s.push_back(alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)]);
      }
    }
    try {
      parse(s);
    } catch (const SyntaxError& e) {
      CHECK(e.line() >= 1);
      CHECK(e.column() >= 1);
    }
  }
}

TEST_CASE("deep nesting is rejected rather than overflowing") {
  std::string s = "a = " + std::string(5000, '(') + "1" + std::string(5000, ')');
  CHECK_THROWS_AS(parse(s), SyntaxError);
}
