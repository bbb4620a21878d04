#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <optional>
#include <set>
#include <thread>

#include "sceneforge/compression.hpp"
#include "sceneforge/error.hpp"
#include "sceneforge/interp.hpp"
#include "sceneforge/verify.hpp"

namespace sceneforge {

namespace {

using dsl::Expr;
using dsl::FuncDef;
using dsl::Program;
using dsl::Stmt;

constexpr double kMatchTolerance = 1e-6;
constexpr std::size_t kMaxCombos = 40000;

const Room& scratch_room() {
  static const Room room = Room::rectangular({-1, -1, 1, 1});
  return room;
}

int rank(ParamKind k) {
  switch (k) {
    case ParamKind::kNumber: return 0;
    case ParamKind::kCount: return 1;
    case ParamKind::kDirection: return 2;
    case ParamKind::kObject: return 3;
    case ParamKind::kOpaque: return 4;
  }
  return 0;
}

std::optional<ParamKind> builtin_arg_kind(const std::string& callee, std::size_t i) {
  using K = ParamKind;
  static const std::map<std::string, std::vector<K>> table = {
      {"furniture", {K::kNumber, K::kNumber, K::kNumber, K::kNumber}},
      {"parallel", {K::kObject, K::kNumber, K::kDirection, K::kOpaque}},
      {"align", {K::kObject, K::kCount, K::kNumber, K::kDirection}},
      {"grid", {K::kObject, K::kCount, K::kCount, K::kNumber, K::kNumber}},
      {"grid_with_offset", {K::kObject, K::kCount, K::kCount, K::kNumber, K::kNumber, K::kOpaque, K::kOpaque}},
      {"symmetrical", {K::kOpaque, K::kNumber, K::kNumber, K::kOpaque}},
      {"cluster_placement", {K::kObject, K::kOpaque, K::kOpaque}},
  };
  auto it = table.find(callee);
  if (it == table.end() || i >= it->second.size()) return std::nullopt;
  return it->second[i];
}

class Classifier {
 public:
  Classifier(const FuncDef& def, const Library& library, std::set<std::string>& visiting)
      : def_(def), library_(library), visiting_(visiting) {}

  std::vector<ParamKind> run() {
    for (const std::string& p : def_.params) kinds_[p] = ParamKind::kNumber;
    stmts(def_.body);
    std::vector<ParamKind> out;
    for (const std::string& p : def_.params) out.push_back(kinds_[p]);
    return out;
  }

 private:
  void mark(const std::string& name, ParamKind k) {
    auto it = kinds_.find(name);
    if (it != kinds_.end() && rank(k) > rank(it->second)) it->second = k;
  }

  void stmts(const std::vector<Stmt>& body) {
    for (const Stmt& s : body) {
      if (const auto* a = std::get_if<dsl::Assign>(&s.node)) expr(a->value, std::nullopt);
      if (const auto* x = std::get_if<dsl::ExprStmt>(&s.node)) expr(x->value, std::nullopt);
      if (const auto* r = std::get_if<dsl::Return>(&s.node)) expr(r->value, std::nullopt);
      if (const auto* f = std::get_if<dsl::RangeFor>(&s.node)) {
        expr(f->lo, ParamKind::kCount);
        expr(f->hi, ParamKind::kCount);
        stmts(f->body);
      }
    }
  }

  void expr(const Expr& e, std::optional<ParamKind> ctx) {
    if (const auto* v = std::get_if<dsl::Var>(&e.node)) {
      if (ctx) mark(v->name, *ctx);
    } else if (const auto* b = std::get_if<dsl::BinOp>(&e.node)) {
      const ParamKind inner =
          ctx && (*ctx == ParamKind::kCount || *ctx == ParamKind::kDirection) ? *ctx : ParamKind::kNumber;
      expr(*b->lhs, inner);
      expr(*b->rhs, inner);
    } else if (const auto* t = std::get_if<dsl::Tuple>(&e.node)) {
      for (const Expr& x : t->items) expr(x, ctx ? std::optional(ParamKind::kNumber) : std::nullopt);
    } else if (const auto* l = std::get_if<dsl::ListLit>(&e.node)) {
      for (const Expr& x : l->items) expr(x, ctx ? std::optional(ParamKind::kNumber) : std::nullopt);
    } else if (const auto* c = std::get_if<dsl::Call>(&e.node)) {
      std::vector<ParamKind> callee_kinds;
      const FuncDef* callee = library_.find(c->callee);
      if (callee && !visiting_.count(callee->name)) {
        visiting_.insert(callee->name);
        callee_kinds = Classifier(*callee, library_, visiting_).run();
        visiting_.erase(callee->name);
      }
      for (std::size_t i = 0; i < c->args.size(); ++i) {
        std::optional<ParamKind> k = builtin_arg_kind(c->callee, i);
        if (!k && i < callee_kinds.size()) k = callee_kinds[i];
        expr(c->args[i], k.value_or(ParamKind::kNumber));
      }
    }
  }

  const FuncDef& def_;
  const Library& library_;
  std::set<std::string>& visiting_;
  std::map<std::string, ParamKind> kinds_;
};

void collect_refs(const Expr& e, std::set<std::string>& out) {
  if (const auto* v = std::get_if<dsl::Var>(&e.node)) {
    out.insert(v->name);
  } else if (const auto* c = std::get_if<dsl::Call>(&e.node)) {
    for (const Expr& a : c->args) collect_refs(a, out);
  } else if (const auto* t = std::get_if<dsl::Tuple>(&e.node)) {
    for (const Expr& a : t->items) collect_refs(a, out);
  } else if (const auto* l = std::get_if<dsl::ListLit>(&e.node)) {
    for (const Expr& a : l->items) collect_refs(a, out);
  } else if (const auto* b = std::get_if<dsl::BinOp>(&e.node)) {
    collect_refs(*b->lhs, out);
    collect_refs(*b->rhs, out);
  }
}

const Expr* statement_value(const Stmt& s) {
  if (const auto* a = std::get_if<dsl::Assign>(&s.node)) return &a->value;
  if (const auto* x = std::get_if<dsl::ExprStmt>(&s.node)) return &x->value;
  return nullptr;
}

std::string statement_name(const Stmt& s) {
  if (const auto* a = std::get_if<dsl::Assign>(&s.node)) return a->name;
  return {};
}

bool is_furniture_literal(const Stmt& s) {
  const Expr* v = statement_value(s);
  const auto* c = v ? std::get_if<dsl::Call>(&v->node) : nullptr;
  if (!c || c->callee != "furniture" || c->args.size() != 4) return false;
  return std::all_of(c->args.begin(), c->args.end(),
                     [](const Expr& a) { return std::holds_alternative<dsl::Number>(a.node); });
}

std::size_t statement_length(const Stmt& s) {
  Program p;
  p.statements.push_back(s);
  return dsl::description_length(p);
}

double snap(double v) {
  const double r = std::round(v * 1e9) / 1e9;
  const double out = std::abs(r - v) <= 1e-10 ? r : v;
  return out == 0.0 ? 0.0 : out;
}

bool boxes_match(const std::vector<Aabb>& got, const std::vector<Aabb>& want, double tol) {
  if (got.size() != want.size()) return false;
  std::vector<char> used(want.size(), 0);
  for (const Aabb& g : got) {
    bool found = false;
    for (std::size_t j = 0; j < want.size() && !found; ++j) {
      if (used[j]) continue;
      const Aabb& w = want[j];
      if (std::abs(g.x_min - w.x_min) <= tol && std::abs(g.y_min - w.y_min) <= tol &&
          std::abs(g.x_max - w.x_max) <= tol && std::abs(g.y_max - w.y_max) <= tol) {
        used[j] = 1;
        found = true;
      }
    }
    if (!found) return false;
  }
  return true;
}

std::vector<std::vector<std::size_t>> orderings(const std::vector<Aabb>& boxes) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> base(boxes.size());
  for (std::size_t i = 0; i < base.size(); ++i) base[i] = i;
  out.push_back(base);
  for (int primary = 0; primary < 2; ++primary) {
    for (int s1 : {1, -1}) {
      for (int s2 : {1, -1}) {
        std::vector<std::size_t> o = base;
        std::stable_sort(o.begin(), o.end(), [&](std::size_t a, std::size_t b) {
          const Vec2 ca = boxes[a].center(), cb = boxes[b].center();
          const double pa = primary == 0 ? ca.x : ca.y, pb = primary == 0 ? cb.x : cb.y;
          const double qa = primary == 0 ? ca.y : ca.x, qb = primary == 0 ? cb.y : cb.x;
          if (std::abs(pa - pb) > kMatchTolerance) return s1 * pa < s1 * pb;
          if (std::abs(qa - qb) > kMatchTolerance) return s2 * qa < s2 * qb;
          return false;
        });
        if (std::find(out.begin(), out.end(), o) == out.end()) out.push_back(std::move(o));
      }
    }
  }
  return out;
}

Eigen::VectorXd flatten(const std::vector<Aabb>& boxes) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(4 * boxes.size()));
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(4 * i);
    v[k] = boxes[i].x_min;
    v[k + 1] = boxes[i].y_min;
    v[k + 2] = boxes[i].x_max;
    v[k + 3] = boxes[i].y_max;
  }
  return v;
}

std::size_t max_output_size(std::span<const Program> corpus, const Library& library) {
  std::size_t k = 2;
  for (const Program& p : corpus) {
    try {
      k = std::max(k, execute(p, library, scratch_room()).objects.size() + 1);
    } catch (const Error&) {
    }
  }
  return k;
}

class Rewriter {
 public:
  Rewriter(const FuncDef& fn, const Library& library, std::size_t max_count)
      : fn_(fn), library_(library) {
    kinds_ = classify_params(fn, library);
    for (std::size_t i = 0; i < kinds_.size(); ++i) {
      switch (kinds_[i]) {
        case ParamKind::kObject:
          if (object_param_) usable_ = false;
          object_param_ = i;
          break;
        case ParamKind::kCount: discrete_.push_back(i); break;
        case ParamKind::kDirection: discrete_.push_back(i); break;
        case ParamKind::kNumber: continuous_.push_back(i); break;
        case ParamKind::kOpaque: usable_ = false; break;
      }
    }
    consumes_ = object_param_ == 0 && consumes_reference(fn.name, library);
    check_executes();
    if (usable_) index_counts(max_count);
  }

  Program rewrite(const Program& original) const {
    if (!usable_) return original;
    Layout reference;
    try {
      reference = execute(original, library_, scratch_room());
    } catch (const Error&) {
      return original;
    }
    Program current = original;
    for (int guard = 0; guard < 10000; ++guard) {
      std::optional<Program> next = improve_once(current, reference);
      if (!next) break;
      current = std::move(*next);
    }
    return current;
  }

 private:
  struct Option {
    enum class Kind { kNone, kExternal, kFresh, kAnchor } kind = Kind::kNone;
    std::string var;
    Aabb box;
    std::vector<Aabb> targets;
    std::set<std::size_t> removed;
    std::size_t insert_at = 0;
    std::string call_name;
  };

  std::optional<std::vector<Aabb>> evaluate(const std::vector<int>& discrete, const std::vector<double>& unknowns,
                                            const Option& opt) const {
    std::vector<Argument> args(kinds_.size());
    for (std::size_t i = 0; i < discrete_.size(); ++i) args[discrete_[i]].value = static_cast<double>(discrete[i]);
    for (std::size_t i = 0; i < continuous_.size(); ++i) args[continuous_[i]].value = unknowns[i];
    if (object_param_) {
      if (opt.kind == Option::Kind::kFresh) {
        const std::size_t m = continuous_.size();
        args[*object_param_].value = Aabb{unknowns[m], unknowns[m + 1], unknowns[m + 2], unknowns[m + 3]};
      } else {
        args[*object_param_].value = opt.box;
      }
    }
    try {
      return evaluate_function(fn_, args, library_);
    } catch (const Error&) {
      return std::nullopt;
    }
  }

  std::vector<double> base_unknowns(const Option& opt, int variant) const {
    std::vector<double> u;
    for (std::size_t i = 0; i < continuous_.size(); ++i) {
      const double j = static_cast<double>(i);
      switch (variant) {
        case 0: u.push_back(1.0 + j); break;
        case 1: u.push_back(0.5 + 0.25 * j); break;
        default: u.push_back(10.0 - j); break;
      }
    }
    if (opt.kind == Option::Kind::kFresh) {
      for (double c : {-0.5, -0.25, 0.5, 0.75}) u.push_back(c);
    }
    return u;
  }

  void check_executes() {
    if (!usable_) return;
    Option opt;
    opt.box = Aabb{0, 0, 1, 1};
    std::vector<int> discrete;
    for (std::size_t i : discrete_) discrete.push_back(kinds_[i] == ParamKind::kDirection ? 1 : 2);
    std::string last_error;
    for (int variant = 0; variant < 3; ++variant) {
      std::vector<Argument> args(kinds_.size());
      const std::vector<double> u = base_unknowns(opt, variant);
      for (std::size_t i = 0; i < discrete_.size(); ++i) args[discrete_[i]].value = static_cast<double>(discrete[i]);
      for (std::size_t i = 0; i < continuous_.size(); ++i) args[continuous_[i]].value = u[i];
      if (object_param_) args[*object_param_].value = opt.box;
      try {
        evaluate_function(fn_, args, library_);
        return;
      } catch (const Error& e) {
        last_error = e.what();
      }
    }
    throw ExecError("candidate '" + fn_.name + "' does not execute: " + last_error);
  }

  void index_counts(std::size_t max_count) {
    Option opt;
    opt.box = Aabb{0, 0, 1, 1};
    std::vector<int> combo(discrete_.size(), 1);
    const std::vector<double> u = base_unknowns(opt, 0);
    for (std::size_t n = 0; n < kMaxCombos; ++n) {
      if (auto out = evaluate(combo, u, opt)) by_count_[out->size()].push_back(combo);
      // Odometer over counts 1..max_count and directions 1..4.
      std::size_t pos = 0;
      for (; pos < combo.size(); ++pos) {
        const int limit = kinds_[discrete_[pos]] == ParamKind::kDirection ? 4 : static_cast<int>(max_count);
        if (++combo[pos] <= limit) break;
        combo[pos] = 1;
      }
      if (pos == combo.size()) break;
    }
  }

  // Best unknown vector reproducing `targets` for this discrete choice.
  std::optional<std::vector<double>> fit(const std::vector<int>& discrete, const Option& opt) const {
    for (int variant = 0; variant < 3; ++variant) {
      const std::vector<double> u0 = base_unknowns(opt, variant);
      const auto f0 = evaluate(discrete, u0, opt);
      if (!f0) continue;
      if (f0->size() != opt.targets.size()) return std::nullopt;
      const Eigen::VectorXd y0 = flatten(*f0);
      Eigen::MatrixXd jac(y0.size(), static_cast<Eigen::Index>(u0.size()));
      bool ok = true;
      for (std::size_t q = 0; q < u0.size() && ok; ++q) {
        ok = false;
        for (double h : {0.25, -0.25}) {
          std::vector<double> u = u0;
          u[q] += h;
          if (auto fq = evaluate(discrete, u, opt); fq && fq->size() == f0->size()) {
            jac.col(static_cast<Eigen::Index>(q)) = (flatten(*fq) - y0) / h;
            ok = true;
            break;
          }
        }
      }
      if (!ok) continue;
      std::optional<Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>> cod;
      if (!u0.empty()) cod.emplace(jac);
      for (const auto& order : orderings(opt.targets)) {
        std::vector<Aabb> ordered;
        for (std::size_t i : order) ordered.push_back(opt.targets[i]);
        const Eigen::VectorXd r = flatten(ordered) - y0;
        const Eigen::VectorXd delta = u0.empty() ? Eigen::VectorXd() : Eigen::VectorXd(cod->solve(r));
        const Eigen::VectorXd resid = u0.empty() ? r : Eigen::VectorXd(jac * delta - r);
        if (resid.size() > 0 && resid.cwiseAbs().maxCoeff() > kMatchTolerance) continue;
        std::vector<double> u = u0;
        for (std::size_t q = 0; q < u.size(); ++q) u[q] = snap(u0[q] + delta[static_cast<Eigen::Index>(q)]);
        const auto out = evaluate(discrete, u, opt);
        if (out && boxes_match(*out, opt.targets, kMatchTolerance)) return u;
      }
      return std::nullopt;
    }
    return std::nullopt;
  }

  Program build(const Program& p, const Option& opt, const std::vector<int>& discrete,
                const std::vector<double>& u, const std::string& fresh_name) const {
    std::vector<Expr> args(kinds_.size());
    for (std::size_t i = 0; i < discrete_.size(); ++i) args[discrete_[i]] = dsl::num(discrete[i]);
    for (std::size_t i = 0; i < continuous_.size(); ++i) args[continuous_[i]] = dsl::num(u[i]);
    if (object_param_) args[*object_param_] = dsl::var(opt.kind == Option::Kind::kFresh ? fresh_name : opt.var);
    Program out;
    out.defs = p.defs;
    for (std::size_t i = 0; i < p.statements.size(); ++i) {
      if (!opt.removed.count(i)) {
        out.statements.push_back(p.statements[i]);
        continue;
      }
      if (i != opt.insert_at) continue;
      if (opt.kind == Option::Kind::kFresh) {
        const std::size_t m = continuous_.size();
        out.statements.push_back(dsl::assign(
            fresh_name, dsl::call("furniture", {dsl::num(u[m]), dsl::num(u[m + 1]), dsl::num(u[m + 2]), dsl::num(u[m + 3])})));
      }
      out.statements.push_back(dsl::assign(opt.call_name, dsl::call(fn_.name, std::move(args))));
    }
    return out;
  }

  std::optional<Program> improve_once(const Program& p, const Layout& reference) const {
    TracedLayout traced;
    try {
      traced = execute_traced(p, library_, scratch_room());
    } catch (const Error&) {
      return std::nullopt;
    }
    const std::size_t n = p.statements.size();
    std::vector<std::string> names(n);
    std::vector<std::set<std::string>> refs(n);
    std::map<std::string, std::size_t> defined_at;
    std::vector<std::vector<Aabb>> emitted(n);
    std::set<std::string> all_names;
    for (std::size_t i = 0; i < n; ++i) {
      names[i] = statement_name(p.statements[i]);
      if (!names[i].empty()) {
        defined_at[names[i]] = i;
        all_names.insert(names[i]);
      }
      if (const Expr* v = statement_value(p.statements[i])) collect_refs(*v, refs[i]);
    }
    for (std::size_t k = 0; k < traced.layout.objects.size(); ++k) {
      emitted[traced.statement_of[k]].push_back(traced.layout.objects[k].box);
    }

    std::vector<std::string> categories;
    std::map<std::string, std::vector<std::size_t>> by_category;
    for (std::size_t i = 0; i < n; ++i) {
      if (names[i].empty()) continue;
      const std::string c = dsl::category_of(names[i]);
      if (!by_category.count(c)) categories.push_back(c);
      by_category[c].push_back(i);
    }

    const auto used_outside = [&](const std::string& name, const std::set<std::size_t>& inside) {
      for (std::size_t i = 0; i < n; ++i) {
        if (!inside.count(i) && refs[i].count(name)) return true;
      }
      return false;
    };

    for (const std::string& category : categories) {
      const std::vector<std::size_t>& list = by_category[category];
      for (std::size_t len = list.size(); len >= 1; --len) {
        for (std::size_t start = 0; start + len <= list.size(); ++start) {
          const std::set<std::size_t> window(list.begin() + static_cast<std::ptrdiff_t>(start),
                                             list.begin() + static_cast<std::ptrdiff_t>(start + len));
          if (auto out = try_window(p, reference, window, category, names, refs, defined_at, emitted,
                                    traced.object_vars, all_names, used_outside)) {
            return out;
          }
        }
      }
    }
    return std::nullopt;
  }

  template <class UsedOutside>
  std::optional<Program> try_window(const Program& p, const Layout& reference, const std::set<std::size_t>& window,
                                    const std::string& category, const std::vector<std::string>& names,
                                    const std::vector<std::set<std::string>>& refs,
                                    const std::map<std::string, std::size_t>& defined_at,
                                    const std::vector<std::vector<Aabb>>& emitted,
                                    const std::map<std::string, Aabb>& object_vars,
                                    const std::set<std::string>& all_names, const UsedOutside& used_outside) const {
    for (std::size_t i : window) {
      if (used_outside(names[i], window)) return std::nullopt;
    }
    std::vector<Aabb> targets;
    std::size_t window_cost = 0;
    std::set<std::string> external;
    for (std::size_t i : window) {
      targets.insert(targets.end(), emitted[i].begin(), emitted[i].end());
      window_cost += statement_length(p.statements[i]);
      for (const std::string& r : refs[i]) {
        bool bound_inside = false;
        for (std::size_t j : window) bound_inside = bound_inside || names[j] == r;
        if (!bound_inside && defined_at.count(r)) external.insert(r);
      }
    }
    if (targets.size() < 2) return std::nullopt;

    // Templates consumed only inside the window disappear with it.
    std::set<std::size_t> dead;
    std::size_t dead_cost = 0;
    for (const std::string& v : external) {
      const std::size_t at = defined_at.at(v);
      if (emitted[at].empty() && !used_outside(v, window)) {
        dead.insert(at);
        dead_cost += statement_length(p.statements[at]);
      }
    }
    const std::size_t np = kinds_.size();
    const std::size_t min_call = 4 + (np == 0 ? 0 : 2 * np - 1);
    if (window_cost + dead_cost <= min_call) return std::nullopt;

    std::string fresh_name;
    for (int k = 1;; ++k) {
      fresh_name = category + "_" + std::to_string(k);
      if (!all_names.count(fresh_name)) break;
    }

    std::vector<Option> options;
    const auto base_option = [&](Option::Kind kind) {
      Option o;
      o.kind = kind;
      o.targets = targets;
      o.removed = window;
      o.removed.insert(dead.begin(), dead.end());
      o.insert_at = *window.rbegin();
      o.call_name = names[*window.begin()];
      return o;
    };
    if (!object_param_) {
      options.push_back(base_option(Option::Kind::kNone));
    } else {
      for (const std::string& v : external) {
        auto box = object_vars.find(v);
        if (box == object_vars.end()) continue;
        const std::size_t at = defined_at.at(v);
        const bool was_emitted = !emitted[at].empty();
        Option o = base_option(Option::Kind::kExternal);
        o.var = v;
        o.box = box->second;
        o.removed.erase(at);
        if (consumes_) {
          if (was_emitted && !used_outside(v, window)) {
            if (dsl::category_of(v) != category) continue;
            o.targets.insert(o.targets.begin(), box->second);
          }
        } else if (!was_emitted) {
          continue;
        }
        options.push_back(std::move(o));
      }
      if (consumes_) options.push_back(base_option(Option::Kind::kFresh));
      if (!consumes_ && window.size() >= 2) {
        for (std::size_t i : window) {
          if (!is_furniture_literal(p.statements[i]) || emitted[i].size() != 1) continue;
          Option o = base_option(Option::Kind::kAnchor);
          o.var = names[i];
          o.box = emitted[i][0];
          o.removed.erase(i);
          o.targets.clear();
          for (std::size_t j : window) {
            if (j != i) o.targets.insert(o.targets.end(), emitted[j].begin(), emitted[j].end());
          }
          std::set<std::size_t> rest = window;
          rest.erase(i);
          o.insert_at = *rest.rbegin();
          o.call_name = names[*rest.begin()];
          options.push_back(std::move(o));
          break;
        }
      }
    }

    const std::size_t before = dsl::description_length(p);
    std::vector<std::pair<std::size_t, Program>> found;
    for (const Option& opt : options) {
      auto it = by_count_.find(opt.targets.size());
      if (it == by_count_.end()) continue;
      for (const std::vector<int>& combo : it->second) {
        const auto u = fit(combo, opt);
        if (!u) continue;
        Program candidate = build(p, opt, combo, *u, fresh_name);
        const std::size_t after = dsl::description_length(candidate);
        if (after >= before) continue;
        found.emplace_back(after, std::move(candidate));
        break;
      }
    }
    std::stable_sort(found.begin(), found.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [cost, candidate] : found) {
      try {
        if (verify(reference, execute(candidate, library_, scratch_room())) >= kExactMiou) {
          return std::move(candidate);
        }
      } catch (const Error&) {
      }
    }
    return std::nullopt;
  }

  const FuncDef& fn_;
  const Library& library_;
  std::vector<ParamKind> kinds_;
  std::optional<std::size_t> object_param_;
  std::vector<std::size_t> discrete_;
  std::vector<std::size_t> continuous_;
  bool usable_ = true;
  bool consumes_ = false;
  std::map<std::size_t, std::vector<std::vector<int>>> by_count_;
};

}  // namespace

std::vector<ParamKind> classify_params(const dsl::FuncDef& def, const Library& library) {
  std::set<std::string> visiting{def.name};
  return Classifier(def, library, visiting).run();
}

dsl::Program rewrite_program(const dsl::Program& program, const std::string& function, const Library& library) {
  const dsl::FuncDef* fn = library.find(function);
  if (!fn) throw Error("library does not define '" + function + "'");
  const std::span<const Program> one(&program, 1);
  const Rewriter rewriter(*fn, library, max_output_size(one, library));
  return rewriter.rewrite(program);
}

RewriteResult rewrite_corpus(std::span<const dsl::Program> corpus, const dsl::FuncDef& candidate,
                             const Library& library) {
  const Library extended = library.with_function(candidate);
  const dsl::FuncDef& fn = *extended.find(candidate.name);
  const Rewriter rewriter(fn, extended, max_output_size(corpus, library));

  RewriteResult result;
  result.corpus.resize(corpus.size());
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), 8));
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < corpus.size(); i += workers) result.corpus[i] = rewriter.rewrite(corpus[i]);
    }));
  }
  for (auto& j : jobs) j.get();

  CompressionReport& r = result.report;
  r.candidate = candidate;
  r.definition_cost = dsl::description_length(candidate);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    r.tokens_before += dsl::description_length(corpus[i]);
    r.tokens_after += dsl::description_length(result.corpus[i]);
    if (!(result.corpus[i] == corpus[i])) ++r.programs_rewritten;
  }
  r.gain = static_cast<long long>(r.tokens_before) - static_cast<long long>(r.tokens_after) -
           static_cast<long long>(r.definition_cost);
  return result;
}

bool accept_candidate(const CompressionReport& report, long long min_gain) {
  return report.gain >= min_gain && report.programs_rewritten >= 2;
}

}  // namespace sceneforge
