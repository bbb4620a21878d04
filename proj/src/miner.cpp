#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>

#include "sceneforge/error.hpp"
#include "sceneforge/wakesleep.hpp"

namespace sceneforge {

namespace {

using dsl::BinaryOp;
using dsl::Expr;

constexpr double kEps = 1e-9;

bool near(double a, double b) { return std::abs(a - b) <= kEps * std::max(1.0, std::max(std::abs(a), std::abs(b))); }

struct Literal {
  std::string category;
  Aabb box;
};

std::optional<Aabb> furniture_literal(const Expr& e) {
  const auto* c = std::get_if<dsl::Call>(&e.node);
  if (!c || c->callee != "furniture" || c->args.size() != 4) return std::nullopt;
  double v[4];
  for (int k = 0; k < 4; ++k) {
    const auto* n = std::get_if<dsl::Number>(&c->args[static_cast<std::size_t>(k)].node);
    if (!n) return std::nullopt;
    v[k] = n->value;
  }
  return Aabb{v[0], v[1], v[2], v[3]};
}

enum class Shape { kHorizontal, kVertical, kLattice };

// One occurrence of a repeated pattern: the first box, the repeat counts and
// the per-step coordinate deltas.
struct Instance {
  std::size_t program = 0;
  Shape shape = Shape::kHorizontal;
  Aabb first;
  int n = 0;        // run length, or cols for a lattice
  int rows = 0;     // lattice only
  double step[4]{}; // along a run, or between columns
  double row_step = 0.0;
};

// Maximal runs of constant step in a sorted sequence of boxes.
std::vector<std::vector<Aabb>> runs(std::vector<Aabb> boxes, bool horizontal) {
  const auto key = [&](const Aabb& b) { return horizontal ? b.x_min : b.y_min; };
  std::sort(boxes.begin(), boxes.end(), [&](const Aabb& a, const Aabb& b) { return key(a) < key(b); });
  std::vector<std::vector<Aabb>> out;
  std::size_t i = 0;
  while (i + 1 < boxes.size()) {
    const double step = key(boxes[i + 1]) - key(boxes[i]);
    if (!(step > kEps)) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j + 1 < boxes.size() && near(key(boxes[j + 1]) - key(boxes[j]), step)) ++j;
    out.emplace_back(boxes.begin() + static_cast<std::ptrdiff_t>(i), boxes.begin() + static_cast<std::ptrdiff_t>(j + 1));
    i = j;
  }
  return out;
}

std::vector<Instance> instances_of(std::size_t index, const dsl::Program& program) {
  std::vector<Literal> literals;
  for (const dsl::Stmt& s : program.statements) {
    const auto* a = std::get_if<dsl::Assign>(&s.node);
    if (!a) continue;
    if (auto b = furniture_literal(a->value)) literals.push_back({dsl::category_of(a->name), *b});
  }
  // Group by category and size.
  std::vector<std::vector<Aabb>> groups;
  std::vector<std::string> group_category;
  for (const Literal& l : literals) {
    bool placed = false;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const Aabb& r = groups[g][0];
      if (group_category[g] == l.category && near(r.width(), l.box.width()) && near(r.height(), l.box.height())) {
        groups[g].push_back(l.box);
        placed = true;
        break;
      }
    }
    if (!placed) {
      groups.push_back({l.box});
      group_category.push_back(l.category);
    }
  }

  std::vector<Instance> out;
  for (const auto& group : groups) {
    if (group.size() < 2) continue;
    for (bool horizontal : {true, false}) {
      // Lines of boxes sharing the coordinate across the run direction.
      std::vector<std::vector<Aabb>> lines;
      for (const Aabb& b : group) {
        const double k = horizontal ? b.y_min : b.x_min;
        bool placed = false;
        for (auto& l : lines) {
          if (near(horizontal ? l[0].y_min : l[0].x_min, k)) {
            l.push_back(b);
            placed = true;
            break;
          }
        }
        if (!placed) lines.push_back({b});
      }
      std::vector<std::vector<Aabb>> all;
      for (const auto& l : lines) {
        for (auto& r : runs(l, horizontal)) all.push_back(std::move(r));
      }
      for (const auto& r : all) {
        Instance in;
        in.program = index;
        in.shape = horizontal ? Shape::kHorizontal : Shape::kVertical;
        in.first = r[0];
        in.n = static_cast<int>(r.size());
        in.step[0] = r[1].x_min - r[0].x_min;
        in.step[1] = r[1].y_min - r[0].y_min;
        in.step[2] = r[1].x_max - r[0].x_max;
        in.step[3] = r[1].y_max - r[0].y_max;
        out.push_back(in);
      }
      if (!horizontal) continue;
      // Lattices: equal horizontal runs stacked at a constant vertical step.
      std::vector<const std::vector<Aabb>*> sorted;
      for (const auto& r : all) sorted.push_back(&r);
      std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return (*a)[0].y_min < (*b)[0].y_min; });
      std::vector<bool> used(sorted.size(), false);
      for (std::size_t s = 0; s < sorted.size(); ++s) {
        if (used[s]) continue;
        const auto& base = *sorted[s];
        const double dx = base[1].x_min - base[0].x_min;
        std::vector<std::size_t> stack{s};
        for (std::size_t t = s + 1; t < sorted.size(); ++t) {
          const auto& cand = *sorted[t];
          if (used[t] || cand.size() != base.size() || !near(cand[0].x_min, base[0].x_min) ||
              !near(cand[1].x_min - cand[0].x_min, dx)) {
            continue;
          }
          const auto& last = *sorted[stack.back()];
          const double dy = cand[0].y_min - last[0].y_min;
          if (stack.size() >= 2) {
            const double step = last[0].y_min - (*sorted[stack[stack.size() - 2]])[0].y_min;
            if (!near(dy, step)) continue;
          } else if (!(dy > kEps)) {
            continue;
          }
          stack.push_back(t);
        }
        if (stack.size() < 2) continue;
        for (std::size_t t : stack) used[t] = true;
        Instance in;
        in.program = index;
        in.shape = Shape::kLattice;
        in.first = base[0];
        in.n = static_cast<int>(base.size());
        in.rows = static_cast<int>(stack.size());
        in.step[0] = in.step[2] = dx;
        in.row_step = (*sorted[stack[1]])[0].y_min - base[0].y_min;
        out.push_back(in);
      }
    }
  }
  return out;
}

// A generalised slot: the values it takes across instances.
struct Slot {
  std::string name;
  std::vector<double> values;
  bool count = false;

  bool constant() const {
    return std::all_of(values.begin(), values.end(), [&](double v) { return near(v, values[0]); });
  }
};

bool same_values(const Slot& a, const Slot& b) {
  if (a.values.size() != b.values.size() || a.count != b.count) return false;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    if (!near(a.values[i], b.values[i])) return false;
  }
  return true;
}

class DefBuilder {
 public:
  explicit DefBuilder(std::vector<Slot> slots) : slots_(std::move(slots)) {
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      const Slot& s = slots_[i];
      if (s.constant()) continue;
      std::optional<std::string> shared;
      for (std::size_t j = 0; j < i; ++j) {
        if (!slots_[j].constant() && same_values(slots_[j], s)) {
          shared = bound_.at(slots_[j].name);
          break;
        }
      }
      if (shared) {
        bound_[s.name] = *shared;
      } else {
        bound_[s.name] = s.name;
        params_.push_back(s.name);
      }
    }
  }

  // The slot as an expression, or nothing for a slot that is constantly zero.
  std::optional<Expr> value(const std::string& name) const {
    const Slot& s = find(name);
    if (s.constant()) {
      if (s.values[0] == 0.0) return std::nullopt;
      return dsl::num(s.count ? std::round(s.values[0]) : s.values[0]);
    }
    return dsl::var(bound_.at(name));
  }

  Expr term(const std::string& base, std::initializer_list<std::pair<const char*, const char*>> steps,
            const char* extra = nullptr) const {
    std::optional<Expr> e = value(base);
    if (extra) e = sum(std::move(e), value(extra));
    for (const auto& [loop_var, step] : steps) {
      std::optional<Expr> st = value(step);
      if (!st) continue;
      e = sum(std::move(e), dsl::binop(BinaryOp::kMul, dsl::var(loop_var), std::move(*st)));
    }
    return e ? std::move(*e) : dsl::num(0.0);
  }

  Expr bound(const std::string& name) const {
    const Slot& s = find(name);
    return s.constant() ? dsl::num(std::round(s.values[0])) : dsl::var(bound_.at(name));
  }

  const std::vector<std::string>& params() const { return params_; }

 private:
  static std::optional<Expr> sum(std::optional<Expr> a, std::optional<Expr> b) {
    if (!a) return b;
    if (!b) return a;
    return dsl::binop(BinaryOp::kAdd, std::move(*a), std::move(*b));
  }

  const Slot& find(const std::string& name) const {
    for (const Slot& s : slots_) {
      if (s.name == name) return s;
    }
    throw Error("unknown slot " + name);
  }

  std::vector<Slot> slots_;
  std::map<std::string, std::string> bound_;
  std::vector<std::string> params_;
};

dsl::Stmt loop(const std::string& var, Expr hi, std::vector<dsl::Stmt> body) {
  dsl::RangeFor f;
  f.var = var;
  f.lo = dsl::num(0.0);
  f.hi = std::move(hi);
  f.body = std::move(body);
  return dsl::Stmt{std::move(f)};
}

dsl::FuncDef line_def(const std::vector<Instance>& family, bool sized) {
  std::vector<Slot> slots;
  const auto add = [&](const std::string& name, auto get, bool count = false) {
    Slot s{name, {}, count};
    for (const Instance& in : family) s.values.push_back(get(in));
    slots.push_back(std::move(s));
  };
  add("x_min", [](const Instance& in) { return in.first.x_min; });
  add("y_min", [](const Instance& in) { return in.first.y_min; });
  if (sized) {
    add("width", [](const Instance& in) { return in.first.width(); });
    add("height", [](const Instance& in) { return in.first.height(); });
  } else {
    add("x_max", [](const Instance& in) { return in.first.x_max; });
    add("y_max", [](const Instance& in) { return in.first.y_max; });
  }
  add("n", [](const Instance& in) { return static_cast<double>(in.n); }, true);
  add("dx", [](const Instance& in) { return in.step[0]; });
  add("dy", [](const Instance& in) { return in.step[1]; });
  if (!sized) {
    add("dx_max", [](const Instance& in) { return in.step[2]; });
    add("dy_max", [](const Instance& in) { return in.step[3]; });
  }
  const DefBuilder b(std::move(slots));
  std::vector<Expr> args;
  args.push_back(b.term("x_min", {{"i", "dx"}}));
  args.push_back(b.term("y_min", {{"i", "dy"}}));
  if (sized) {
    args.push_back(b.term("x_min", {{"i", "dx"}}, "width"));
    args.push_back(b.term("y_min", {{"i", "dy"}}, "height"));
  } else {
    args.push_back(b.term("x_max", {{"i", "dx_max"}}));
    args.push_back(b.term("y_max", {{"i", "dy_max"}}));
  }
  dsl::FuncDef def;
  def.params = b.params();
  def.body.push_back(loop("i", b.bound("n"), {dsl::assign("obj", dsl::call("furniture", std::move(args)))}));
  def.body.push_back(dsl::Stmt{dsl::Return{dsl::var("obj")}});
  return def;
}

dsl::FuncDef lattice_def(const std::vector<Instance>& family, bool sized) {
  std::vector<Slot> slots;
  const auto add = [&](const std::string& name, auto get, bool count = false) {
    Slot s{name, {}, count};
    for (const Instance& in : family) s.values.push_back(get(in));
    slots.push_back(std::move(s));
  };
  add("x_min", [](const Instance& in) { return in.first.x_min; });
  add("y_min", [](const Instance& in) { return in.first.y_min; });
  if (sized) {
    add("width", [](const Instance& in) { return in.first.width(); });
    add("height", [](const Instance& in) { return in.first.height(); });
  } else {
    add("x_max", [](const Instance& in) { return in.first.x_max; });
    add("y_max", [](const Instance& in) { return in.first.y_max; });
  }
  add("rows", [](const Instance& in) { return static_cast<double>(in.rows); }, true);
  add("cols", [](const Instance& in) { return static_cast<double>(in.n); }, true);
  add("dx", [](const Instance& in) { return in.step[0]; });
  add("dy", [](const Instance& in) { return in.row_step; });
  const DefBuilder b(std::move(slots));
  std::vector<Expr> args;
  args.push_back(b.term("x_min", {{"c", "dx"}}));
  args.push_back(b.term("y_min", {{"r", "dy"}}));
  if (sized) {
    args.push_back(b.term("x_min", {{"c", "dx"}}, "width"));
    args.push_back(b.term("y_min", {{"r", "dy"}}, "height"));
  } else {
    args.push_back(b.term("x_max", {{"c", "dx"}}));
    args.push_back(b.term("y_max", {{"r", "dy"}}));
  }
  dsl::FuncDef def;
  def.params = b.params();
  std::vector<dsl::Stmt> inner{loop("c", b.bound("cols"), {dsl::assign("obj", dsl::call("furniture", std::move(args)))})};
  def.body.push_back(loop("r", b.bound("rows"), std::move(inner)));
  def.body.push_back(dsl::Stmt{dsl::Return{dsl::var("obj")}});
  return def;
}

std::size_t distinct_programs(const std::vector<Instance>& family) {
  std::set<std::size_t> s;
  for (const Instance& in : family) s.insert(in.program);
  return s.size();
}

}  // namespace

std::vector<dsl::FuncDef> mine_abstractions(std::span<const dsl::Program> corpus, const Library& library) {
  std::vector<Instance> all;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    for (Instance& in : instances_of(i, corpus[i])) all.push_back(in);
  }
  std::vector<dsl::FuncDef> out;
  std::set<std::string> taken;
  for (const dsl::FuncDef& f : library.functions) taken.insert(f.name);
  const auto publish = [&](dsl::FuncDef def, const std::string& stem) {
    if (def.params.empty()) return;
    for (const dsl::FuncDef& f : library.functions) {
      if (f.params == def.params && f.body == def.body) return;
    }
    for (const dsl::FuncDef& f : out) {
      if (f.params == def.params && f.body == def.body) return;
    }
    std::string name = stem;
    for (int k = 2; taken.count(name) || is_builtin_name(name); ++k) name = stem + "_" + std::to_string(k);
    taken.insert(name);
    def.name = name;
    out.push_back(std::move(def));
  };

  struct Variant {
    const char* stem;
    bool (*member)(const Instance&);
  };
  const Variant lines[] = {
      {"repeat_row", [](const Instance& in) { return in.shape == Shape::kHorizontal; }},
      {"repeat_column", [](const Instance& in) { return in.shape == Shape::kVertical; }},
      {"repeat_line", [](const Instance& in) { return in.shape != Shape::kLattice; }},
  };
  for (bool sized : {false, true}) {
    for (const Variant& v : lines) {
      std::vector<Instance> family;
      std::copy_if(all.begin(), all.end(), std::back_inserter(family), v.member);
      if (distinct_programs(family) < 2) continue;
      publish(line_def(family, sized), std::string(v.stem) + (sized ? "_sized" : ""));
    }
    std::vector<Instance> family;
    std::copy_if(all.begin(), all.end(), std::back_inserter(family),
                 [](const Instance& in) { return in.shape == Shape::kLattice; });
    if (distinct_programs(family) >= 2) publish(lattice_def(family, sized), sized ? "repeat_grid_sized" : "repeat_grid");
  }
  return out;
}

}  // namespace sceneforge
