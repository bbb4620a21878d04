#include "sceneforge/interp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <variant>

#include "sceneforge/error.hpp"

namespace sceneforge {

const PlacedObject* Layout::find(int id) const {
  for (const PlacedObject& o : objects) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

Room Room::rectangular(const Aabb& b) {
  Room room;
  room.bounds = b;
  room.walls = {
      Wall{{b.x_min, b.y_min}, {b.x_max, b.y_min}},
      Wall{{b.x_max, b.y_min}, {b.x_max, b.y_max}},
      Wall{{b.x_max, b.y_max}, {b.x_min, b.y_max}},
      Wall{{b.x_min, b.y_max}, {b.x_min, b.y_min}},
  };
  return room;
}

namespace {

using dsl::Expr;
using dsl::FuncDef;
using dsl::Stmt;

constexpr std::size_t kMaxIterations = 200000;
constexpr int kMaxCallDepth = 64;

struct ObjectRef {
  std::size_t handle = 0;
};

struct Value;
using ValueList = std::vector<Value>;

struct TupleValue {
  ValueList items;
};
struct ListValue {
  ValueList items;
};

struct Value {
  std::variant<double, TupleValue, ListValue, ObjectRef> v;
};

struct RuntimeObject {
  Aabb box;
  std::optional<int> emitted_id;
  Role role = Role::kPrimary;
  std::optional<int> target;
};

using Env = std::vector<std::map<std::string, Value>>;

const char* kind_name(const Value& v) {
  switch (v.v.index()) {
    case 0: return "number";
    case 1: return "tuple";
    case 2: return "list";
    default: return "object";
  }
}

const FuncDef* find_def(std::string_view name, const Library& library,
                        std::span<const FuncDef> local_defs) {
  for (const FuncDef& d : local_defs) {
    if (d.name == name) return &d;
  }
  return library.find(name);
}

// Records, for variable `name`, whether each occurrence is the first argument
// of a consuming call.
void collect_uses(const Expr& e, const std::string& name, const Library& library,
                  std::span<const FuncDef> local_defs, int& consuming, int& other);

void collect_uses_args(const dsl::Call& c, const std::string& name, const Library& library,
                       std::span<const FuncDef> local_defs, int& consuming, int& other) {
  for (std::size_t i = 0; i < c.args.size(); ++i) {
    const auto* v = std::get_if<dsl::Var>(&c.args[i].node);
    if (i == 0 && v && v->name == name && consumes_reference(c.callee, library, local_defs)) {
      ++consuming;
      continue;
    }
    collect_uses(c.args[i], name, library, local_defs, consuming, other);
  }
}

void collect_uses(const Expr& e, const std::string& name, const Library& library,
                  std::span<const FuncDef> local_defs, int& consuming, int& other) {
  if (const auto* v = std::get_if<dsl::Var>(&e.node)) {
    if (v->name == name) ++other;
  } else if (const auto* c = std::get_if<dsl::Call>(&e.node)) {
    collect_uses_args(*c, name, library, local_defs, consuming, other);
  } else if (const auto* t = std::get_if<dsl::Tuple>(&e.node)) {
    for (const Expr& x : t->items) collect_uses(x, name, library, local_defs, consuming, other);
  } else if (const auto* l = std::get_if<dsl::ListLit>(&e.node)) {
    for (const Expr& x : l->items) collect_uses(x, name, library, local_defs, consuming, other);
  } else if (const auto* b = std::get_if<dsl::BinOp>(&e.node)) {
    collect_uses(*b->lhs, name, library, local_defs, consuming, other);
    collect_uses(*b->rhs, name, library, local_defs, consuming, other);
  }
}

void collect_uses_stmts(const std::vector<Stmt>& body, const std::string& name,
                        const Library& library, std::span<const FuncDef> local_defs,
                        int& consuming, int& other) {
  for (const Stmt& s : body) {
    if (const auto* a = std::get_if<dsl::Assign>(&s.node)) {
      collect_uses(a->value, name, library, local_defs, consuming, other);
    } else if (const auto* x = std::get_if<dsl::ExprStmt>(&s.node)) {
      collect_uses(x->value, name, library, local_defs, consuming, other);
    } else if (const auto* r = std::get_if<dsl::Return>(&s.node)) {
      collect_uses(r->value, name, library, local_defs, consuming, other);
    } else if (const auto* f = std::get_if<dsl::RangeFor>(&s.node)) {
      collect_uses(f->lo, name, library, local_defs, consuming, other);
      collect_uses(f->hi, name, library, local_defs, consuming, other);
      collect_uses_stmts(f->body, name, library, local_defs, consuming, other);
    }
  }
}

thread_local std::set<std::string> g_consume_visiting;

class Interpreter {
 public:
  Interpreter(const dsl::Program& program, const Library& library)
      : program_(program), library_(library) {}

  TracedLayout run(const Room& room) {
    TracedLayout out;
    out.layout.walls = room.walls;
    out.layout.room_bounds = room.bounds;
    find_templates();

    Env env(1);
    for (std::size_t si = 0; si < program_.statements.size(); ++si) {
      const Stmt& s = program_.statements[si];
      const std::size_t first_new = objects_.size();
      const Expr* expr = nullptr;
      std::string name;
      if (const auto* a = std::get_if<dsl::Assign>(&s.node)) {
        expr = &a->value;
        name = a->name;
      } else if (const auto* x = std::get_if<dsl::ExprStmt>(&s.node)) {
        expr = &x->value;
      } else {
        throw ExecError("statement " + std::to_string(si + 1) + ": only assignments and calls are allowed at top level");
      }
      Value value = eval(*expr, env, {});
      if (!name.empty()) {
        env.back()[name] = value;
        if (const auto* obj = std::get_if<ObjectRef>(&value.v)) out.object_vars[name] = objects_[obj->handle].box;
      }

      // Provenance is decided by the call's reference argument.
      Role role = Role::kPrimary;
      std::optional<int> target;
      std::string category = name.empty() ? "object" : dsl::category_of(name);
      if (const auto* c = std::get_if<dsl::Call>(&expr->node); c && !c->args.empty()) {
        if (const auto* v = std::get_if<dsl::Var>(&c->args[0].node)) {
          if (name.empty()) category = dsl::category_of(v->name);
          const Value& ref = lookup(env, v->name);
          if (const auto* obj = std::get_if<ObjectRef>(&ref.v)) {
            const RuntimeObject& t = objects_[obj->handle];
            if (t.emitted_id) {
              role = Role::kDependent;
              target = t.emitted_id;
            } else {
              role = t.role;
              target = t.target;
            }
          }
        }
      }

      std::vector<std::size_t> fresh;
      collect_fresh(value, first_new, fresh);
      const bool is_template = !name.empty() && templates_.count(name) > 0;
      const std::string call_text = dsl::format(*expr);
      for (std::size_t h : fresh) {
        RuntimeObject& o = objects_[h];
        o.role = role;
        o.target = target;
        if (is_template || o.emitted_id) continue;
        o.emitted_id = static_cast<int>(out.layout.objects.size());
        out.layout.objects.push_back(
            PlacedObject{*o.emitted_id, category, o.box, role, target, call_text});
        out.statement_of.push_back(si);
      }
    }
    return out;
  }

  std::vector<Aabb> call_function(const FuncDef& def, std::span<const Argument> args) {
    std::vector<Value> values;
    for (const Argument& a : args) {
      if (const auto* d = std::get_if<double>(&a.value)) {
        values.push_back(Value{*d});
      } else {
        objects_.push_back(RuntimeObject{std::get<Aabb>(a.value), std::nullopt, Role::kPrimary, std::nullopt});
        values.push_back(Value{ObjectRef{objects_.size() - 1}});
      }
    }
    const std::size_t first_new = objects_.size();
    Value result = invoke(def, std::move(values));
    std::vector<std::size_t> fresh;
    collect_fresh(result, first_new, fresh);
    std::vector<Aabb> out;
    for (std::size_t h : fresh) out.push_back(objects_[h].box);
    return out;
  }

 private:
  void find_templates() {
    for (std::size_t i = 0; i < program_.statements.size(); ++i) {
      const auto* a = std::get_if<dsl::Assign>(&program_.statements[i].node);
      if (!a) continue;
      int consuming = 0;
      int other = 0;
      std::vector<Stmt> later(program_.statements.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                              program_.statements.end());
      collect_uses_stmts(later, a->name, library_, program_.defs, consuming, other);
      if (consuming > 0 && other == 0) templates_.insert(a->name);
    }
  }

  void collect_fresh(const Value& v, std::size_t first_new, std::vector<std::size_t>& out) const {
    if (const auto* o = std::get_if<ObjectRef>(&v.v)) {
      if (o->handle >= first_new && std::find(out.begin(), out.end(), o->handle) == out.end()) {
        out.push_back(o->handle);
      }
    } else if (const auto* l = std::get_if<ListValue>(&v.v)) {
      for (const Value& x : l->items) collect_fresh(x, first_new, out);
    } else if (const auto* t = std::get_if<TupleValue>(&v.v)) {
      for (const Value& x : t->items) collect_fresh(x, first_new, out);
    }
  }

  static const Value& lookup(const Env& env, const std::string& name) {
    for (auto it = env.rbegin(); it != env.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return f->second;
    }
    throw ExecError("unresolved name '" + name + "'");
  }

  double number(const Value& v, std::string_view what) const {
    if (const auto* d = std::get_if<double>(&v.v)) return *d;
    throw ExecError(std::string(what) + " must be a number, got " + kind_name(v));
  }

  static int whole(double d, std::string_view what) {
    const double r = std::round(d);
    if (!std::isfinite(d) || std::abs(d - r) > 1e-9 || std::abs(r) > 1e6) {
      throw ExecError(std::string(what) + " must be a whole number, got " + dsl::format_number(d));
    }
    return static_cast<int>(r);
  }

  const Aabb& object_box(const Value& v, std::string_view what) const {
    if (const auto* o = std::get_if<ObjectRef>(&v.v)) return objects_[o->handle].box;
    throw ExecError(std::string(what) + " must be an object, got " + kind_name(v));
  }

  stdlib::Size size_arg(const Value& v, std::string_view what) const {
    const auto* t = std::get_if<TupleValue>(&v.v);
    if (!t || t->items.size() != 2) throw ExecError(std::string(what) + " must be a (width, height) tuple");
    return {number(t->items[0], what), number(t->items[1], what)};
  }

  Vec2 point_arg(const Value& v, std::string_view what) const {
    const auto* t = std::get_if<TupleValue>(&v.v);
    if (!t || t->items.size() != 2) throw ExecError(std::string(what) + " must be an (x, y) tuple");
    return {number(t->items[0], what), number(t->items[1], what)};
  }

  std::vector<double> number_list(const Value& v, std::string_view what) const {
    const auto* l = std::get_if<ListValue>(&v.v);
    if (!l) throw ExecError(std::string(what) + " must be a list of numbers");
    std::vector<double> out;
    for (const Value& x : l->items) out.push_back(number(x, what));
    return out;
  }

  Value make_object(const Aabb& box) {
    if (!box.valid()) throw ExecError("placement produced a non-finite or inverted box");
    objects_.push_back(RuntimeObject{box, std::nullopt, Role::kPrimary, std::nullopt});
    return Value{ObjectRef{objects_.size() - 1}};
  }

  Value make_objects(const std::vector<Aabb>& boxes) {
    ListValue list;
    for (const Aabb& b : boxes) list.items.push_back(make_object(b));
    return Value{std::move(list)};
  }

  static void arity(const std::string& callee, std::size_t got, std::size_t lo, std::size_t hi) {
    if (got < lo || got > hi) {
      const std::string expected =
          lo == hi ? std::to_string(lo) : std::to_string(lo) + " to " + std::to_string(hi);
      throw ExecError(callee + "() takes " + expected + " arguments, got " + std::to_string(got));
    }
  }

  Value call_builtin(const std::string& callee, const std::vector<Value>& a) {
    if (callee == "furniture") {
      arity(callee, a.size(), 4, 4);
      return make_object(stdlib::furniture(number(a[0], "x_min"), number(a[1], "y_min"),
                                           number(a[2], "x_max"), number(a[3], "y_max")));
    }
    if (callee == "parallel") {
      arity(callee, a.size(), 3, 4);
      std::optional<stdlib::Size> size;
      if (a.size() == 4) size = size_arg(a[3], "parallel_object_size");
      return make_object(stdlib::parallel(object_box(a[0], "obj_anchor"), number(a[1], "distance_apart"),
                                          whole(number(a[2], "direction"), "direction"), size));
    }
    if (callee == "align") {
      arity(callee, a.size(), 4, 4);
      return make_objects(stdlib::align(object_box(a[0], "obj_ref"), whole(number(a[1], "count"), "count"),
                                        number(a[2], "distance"), whole(number(a[3], "direction"), "direction")));
    }
    if (callee == "grid") {
      arity(callee, a.size(), 5, 5);
      return make_objects(stdlib::grid(object_box(a[0], "obj_ref"), whole(number(a[1], "rows"), "rows"),
                                       whole(number(a[2], "cols"), "cols"), number(a[3], "h_distance"),
                                       number(a[4], "v_distance")));
    }
    if (callee == "grid_with_offset") {
      arity(callee, a.size(), 5, 7);
      std::vector<double> rows_off;
      std::vector<double> cols_off;
      if (a.size() >= 6) rows_off = number_list(a[5], "row_offsets");
      if (a.size() >= 7) cols_off = number_list(a[6], "col_offsets");
      return make_objects(stdlib::grid_with_offset(
          object_box(a[0], "obj_ref"), whole(number(a[1], "rows"), "rows"), whole(number(a[2], "cols"), "cols"),
          number(a[3], "h_distance"), number(a[4], "v_distance"), rows_off, cols_off));
    }
    if (callee == "symmetrical") {
      arity(callee, a.size(), 4, 4);
      return make_objects(stdlib::symmetrical(point_arg(a[0], "center"), number(a[1], "distance_x"),
                                              number(a[2], "distance_y"),
                                              size_arg(a[3], "symmetrical_objects_size")));
    }
    if (callee == "cluster_placement") {
      arity(callee, a.size(), 2, 3);
      const auto* l = std::get_if<ListValue>(&a[1].v);
      if (!l) throw ExecError("offsets must be a list of (x, y) tuples");
      std::vector<Vec2> offsets;
      for (const Value& x : l->items) offsets.push_back(point_arg(x, "offset"));
      std::optional<stdlib::Size> size;
      if (a.size() == 3) size = size_arg(a[2], "clustered_objects_size");
      return make_objects(stdlib::cluster_placement(object_box(a[0], "obj_center"), offsets, size));
    }
    throw ExecError("unknown built-in '" + callee + "'");
  }

  Value eval_call(const dsl::Call& c, Env& env, std::span<const std::string> stack) {
    std::vector<Value> args;
    args.reserve(c.args.size());
    for (const Expr& e : c.args) args.push_back(eval(e, env, stack));

    if (const FuncDef* def = find_def(c.callee, library_, program_.defs)) {
      if (std::find(stack.begin(), stack.end(), def->name) != stack.end()) {
        throw ExecError("recursive call to '" + def->name + "'");
      }
      if (stack.size() >= kMaxCallDepth) throw ExecError("call depth limit exceeded");
      std::vector<std::string> inner(stack.begin(), stack.end());
      inner.push_back(def->name);
      return invoke(*def, std::move(args), inner);
    }
    if (is_builtin_name(c.callee)) {
      if (!library_.has_builtin(c.callee)) {
        throw ExecError("'" + c.callee + "' is not in the current library");
      }
      return call_builtin(c.callee, args);
    }
    throw ExecError("unresolved function '" + c.callee + "'");
  }

  Value invoke(const FuncDef& def, std::vector<Value> args, std::span<const std::string> stack = {}) {
    if (args.size() != def.params.size()) {
      throw ExecError(def.name + "() takes " + std::to_string(def.params.size()) + " arguments, got " +
                      std::to_string(args.size()));
    }
    std::vector<std::string> inner(stack.begin(), stack.end());
    if (inner.empty() || inner.back() != def.name) inner.push_back(def.name);
    Env env(1);
    for (std::size_t i = 0; i < args.size(); ++i) env.back()[def.params[i]] = std::move(args[i]);
    std::optional<Value> ret = exec_block(def.body, env, inner);
    if (!ret) throw ExecError(def.name + "() finished without return");
    return *ret;
  }

  static void gather(Value& acc, const Value& v) {
    auto& items = std::get<ListValue>(acc.v).items;
    if (const auto* l = std::get_if<ListValue>(&v.v)) {
      items.insert(items.end(), l->items.begin(), l->items.end());
    } else {
      items.push_back(v);
    }
  }

  std::optional<Value> exec_block(const std::vector<Stmt>& body, Env& env, std::span<const std::string> stack) {
    for (const Stmt& s : body) {
      if (const auto* a = std::get_if<dsl::Assign>(&s.node)) {
        env.back()[a->name] = eval(a->value, env, stack);
      } else if (const auto* x = std::get_if<dsl::ExprStmt>(&s.node)) {
        eval(x->value, env, stack);
      } else if (const auto* r = std::get_if<dsl::Return>(&s.node)) {
        return eval(r->value, env, stack);
      } else if (const auto* f = std::get_if<dsl::RangeFor>(&s.node)) {
        const int lo = whole(number(eval(f->lo, env, stack), "loop bound"), "loop bound");
        const int hi = whole(number(eval(f->hi, env, stack), "loop bound"), "loop bound");
        std::map<std::string, Value> gathered;
        for (int i = lo; i < hi; ++i) {
          if (++iterations_ > kMaxIterations) throw ExecError("loop iteration limit exceeded");
          env.emplace_back();
          env.back()[f->var] = Value{static_cast<double>(i)};
          exec_block(f->body, env, stack);
          for (auto& [k, v] : env.back()) {
            if (k == f->var) continue;
            auto [it, inserted] = gathered.try_emplace(k, Value{ListValue{}});
            gather(it->second, v);
          }
          env.pop_back();
        }
        // Names bound in an empty loop still exist afterwards, as empty lists.
        std::vector<std::string> names;
        assigned_names(f->body, names);
        for (const std::string& n : names) {
          auto it = gathered.find(n);
          env.back()[n] = it != gathered.end() ? it->second : Value{ListValue{}};
        }
      }
    }
    return std::nullopt;
  }

  static void assigned_names(const std::vector<Stmt>& body, std::vector<std::string>& out) {
    for (const Stmt& s : body) {
      if (const auto* a = std::get_if<dsl::Assign>(&s.node)) out.push_back(a->name);
      if (const auto* f = std::get_if<dsl::RangeFor>(&s.node)) assigned_names(f->body, out);
    }
  }

  Value eval(const Expr& e, Env& env, std::span<const std::string> stack) {
    if (const auto* n = std::get_if<dsl::Number>(&e.node)) {
      if (!std::isfinite(n->value)) throw ExecError("non-finite literal");
      return Value{n->value};
    }
    if (const auto* v = std::get_if<dsl::Var>(&e.node)) return lookup(env, v->name);
    if (const auto* c = std::get_if<dsl::Call>(&e.node)) return eval_call(*c, env, stack);
    if (const auto* t = std::get_if<dsl::Tuple>(&e.node)) {
      TupleValue out;
      for (const Expr& x : t->items) out.items.push_back(eval(x, env, stack));
      return Value{std::move(out)};
    }
    if (const auto* l = std::get_if<dsl::ListLit>(&e.node)) {
      ListValue out;
      for (const Expr& x : l->items) out.items.push_back(eval(x, env, stack));
      return Value{std::move(out)};
    }
    const auto& b = std::get<dsl::BinOp>(e.node);
    const double lhs = number(eval(*b.lhs, env, stack), "arithmetic operand");
    const double rhs = number(eval(*b.rhs, env, stack), "arithmetic operand");
    double r = 0.0;
    switch (b.op) {
      case dsl::BinaryOp::kAdd: r = lhs + rhs; break;
      case dsl::BinaryOp::kSub: r = lhs - rhs; break;
      case dsl::BinaryOp::kMul: r = lhs * rhs; break;
      case dsl::BinaryOp::kDiv:
        if (rhs == 0.0) throw ExecError("division by zero");
        r = lhs / rhs;
        break;
    }
    if (!std::isfinite(r)) throw ExecError("arithmetic produced a non-finite value");
    return Value{r};
  }

  const dsl::Program& program_;
  const Library& library_;
  std::vector<RuntimeObject> objects_;
  std::set<std::string> templates_;
  std::size_t iterations_ = 0;
};

}  // namespace

bool consumes_reference(const std::string& callee, const Library& library,
                        std::span<const FuncDef> local_defs) {
  if (callee == "align" || callee == "grid" || callee == "grid_with_offset") return true;
  const FuncDef* def = find_def(callee, library, local_defs);
  if (!def || def->params.empty()) return false;
  if (g_consume_visiting.count(def->name)) return false;
  g_consume_visiting.insert(def->name);
  int consuming = 0;
  int other = 0;
  collect_uses_stmts(def->body, def->params[0], library, local_defs, consuming, other);
  g_consume_visiting.erase(def->name);
  return consuming > 0 && other == 0;
}

TracedLayout execute_traced(const dsl::Program& program, const Library& library, const Room& room) {
  Interpreter interp(program, library);
  return interp.run(room);
}

Layout execute(const dsl::Program& program, const Library& library, const Room& room) {
  return execute_traced(program, library, room).layout;
}

std::vector<Aabb> evaluate_function(const dsl::FuncDef& def, std::span<const Argument> args,
                                    const Library& library) {
  static const dsl::Program empty;
  Interpreter interp(empty, library);
  return interp.call_function(def, args);
}

}  // namespace sceneforge
