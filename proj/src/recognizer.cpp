#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "sceneforge/error.hpp"
#include "sceneforge/verify.hpp"
#include "sceneforge/wakesleep.hpp"

namespace sceneforge {

namespace {

using dsl::Expr;

constexpr double kEps = 1e-9;

bool near(double a, double b) { return std::abs(a - b) <= kEps * std::max(1.0, std::max(std::abs(a), std::abs(b))); }

bool same_size(const Aabb& a, const Aabb& b) { return near(a.width(), b.width()) && near(a.height(), b.height()); }

std::string sanitize_category(const std::string& category) {
  std::string out;
  for (char ch : category) {
    const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    out.push_back(c >= 'a' && c <= 'z' ? c : '_');
  }
  if (out.empty()) out = "object";
  return out;
}

// Drops float noise left by box arithmetic, e.g. 0.3999999999999999 -> 0.4.
Expr number(double v) {
  const double r = std::round(v * 1e9) / 1e9;
  return dsl::num(std::abs(r - v) <= 1e-12 * std::max(1.0, std::abs(v)) ? r : v);
}

Expr box_literal(const Aabb& b) {
  return dsl::call("furniture", {number(b.x_min), number(b.y_min), number(b.x_max), number(b.y_max)});
}

Expr pair_literal(double a, double b) { return dsl::tuple({number(a), number(b)}); }

class Builder {
 public:
  Builder(const Layout& layout, const Library& library) : layout_(layout), library_(library) {
    for (const PlacedObject& o : layout.objects) {
      residual_.push_back(true);
      base_[o.category] = sanitize_category(o.category);
      if (std::find(categories_.begin(), categories_.end(), o.category) == categories_.end()) {
        categories_.push_back(o.category);
      }
    }
  }

  dsl::Program run() {
    if (library_.has_builtin("grid") || library_.has_builtin("grid_with_offset")) {
      for (const std::string& c : categories_) grids(c);
    }
    if (library_.has_builtin("align")) {
      for (const std::string& c : categories_) rows(c);
    }
    if (library_.has_builtin("symmetrical")) {
      for (const std::string& c : categories_) quadruples(c);
    }
    if (library_.has_builtin("cluster_placement")) {
      for (const std::string& c : categories_) clusters(c);
    }
    if (library_.has_builtin("parallel")) {
      for (const std::string& c : categories_) pairs(c);
    }
    for (const std::string& c : categories_) {
      std::vector<std::size_t> rest = residual_of(c);
      std::stable_sort(rest.begin(), rest.end(), [&](std::size_t a, std::size_t b) {
        const Vec2 ca = box(a).center(), cb = box(b).center();
        if (ca.y != cb.y) return ca.y > cb.y;
        return ca.x < cb.x;
      });
      for (std::size_t i : rest) anchor_var(i);
    }
    return program_;
  }

 private:
  const Aabb& box(std::size_t i) const { return layout_.objects[i].box; }

  std::vector<std::size_t> residual_of(const std::string& category) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < layout_.objects.size(); ++i) {
      if (residual_[i] && layout_.objects[i].category == category) out.push_back(i);
    }
    return out;
  }

  // Residual objects of one category, split into groups of equal size.
  std::vector<std::vector<std::size_t>> size_groups(const std::string& category) const {
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t i : residual_of(category)) {
      bool placed = false;
      for (auto& g : groups) {
        if (same_size(box(g[0]), box(i))) {
          g.push_back(i);
          placed = true;
          break;
        }
      }
      if (!placed) groups.push_back({i});
    }
    return groups;
  }

  std::string fresh_name(const std::string& category) {
    const std::string base = base_.at(category);
    return base + "_" + std::to_string(++counter_[base]);
  }

  void emit(const std::string& name, Expr value) { program_.statements.push_back(dsl::assign(name, std::move(value))); }

  // Variable holding object i as a furniture literal, created on first use.
  std::string anchor_var(std::size_t i) {
    auto it = vars_.find(i);
    if (it != vars_.end()) return it->second;
    const std::string name = fresh_name(layout_.objects[i].category);
    emit(name, box_literal(box(i)));
    residual_[i] = false;
    vars_[i] = name;
    return name;
  }

  void take(const std::vector<std::size_t>& ids) {
    for (std::size_t i : ids) residual_[i] = false;
  }

  // Lines of objects sharing one coordinate (axis 0: same y, ordered by x).
  std::vector<std::vector<std::size_t>> lines(const std::vector<std::size_t>& group, int axis) const {
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t i : group) {
      const double key = axis == 0 ? box(i).center().y : box(i).center().x;
      bool placed = false;
      for (auto& l : out) {
        const double k = axis == 0 ? box(l[0]).center().y : box(l[0]).center().x;
        if (near(k, key)) {
          l.push_back(i);
          placed = true;
          break;
        }
      }
      if (!placed) out.push_back({i});
    }
    for (auto& l : out) {
      std::sort(l.begin(), l.end(), [&](std::size_t a, std::size_t b) {
        return axis == 0 ? box(a).center().x < box(b).center().x : box(a).center().y < box(b).center().y;
      });
    }
    return out;
  }

  double along(std::size_t i, int axis) const { return axis == 0 ? box(i).center().x : box(i).center().y; }
  double across(std::size_t i, int axis) const { return axis == 0 ? box(i).center().y : box(i).center().x; }

  // Step of an evenly spaced line, if it is one.
  std::optional<double> line_step(const std::vector<std::size_t>& line, int axis) const {
    if (line.size() < 2) return std::nullopt;
    const double step = along(line[1], axis) - along(line[0], axis);
    if (!(step > kEps)) return std::nullopt;
    for (std::size_t k = 2; k < line.size(); ++k) {
      if (!near(along(line[k], axis) - along(line[k - 1], axis), step)) return std::nullopt;
    }
    return step;
  }

  struct Lattice {
    std::vector<std::vector<std::size_t>> lines;  // ordered so the first line is the grid's first row or column
    double step = 0.0;                            // spacing within a line
    double gap = 0.0;                             // spacing between lines
    bool shifted = false;
  };

  // Largest set of parallel evenly spaced lines with equal counts and steps,
  // themselves evenly spaced.
  std::optional<Lattice> find_lattice(const std::vector<std::size_t>& group, int axis) const {
    std::vector<std::vector<std::size_t>> ls;
    for (auto& l : lines(group, axis)) {
      if (line_step(l, axis)) ls.push_back(std::move(l));
    }
    std::optional<Lattice> best;
    for (std::size_t a = 0; a < ls.size(); ++a) {
      std::vector<std::vector<std::size_t>> same;
      const double step = *line_step(ls[a], axis);
      for (const auto& l : ls) {
        if (l.size() == ls[a].size() && near(*line_step(l, axis), step)) same.push_back(l);
      }
      if (same.size() < 2) continue;
      // Order lines top to bottom for rows, left to right for columns.
      std::sort(same.begin(), same.end(), [&](const auto& x, const auto& y) {
        return axis == 0 ? across(x[0], axis) > across(y[0], axis) : across(x[0], axis) < across(y[0], axis);
      });
      for (std::size_t s = 0; s + 1 < same.size(); ++s) {
        const double gap = std::abs(across(same[s + 1][0], axis) - across(same[s][0], axis));
        if (!(gap > kEps)) continue;
        std::size_t e = s + 1;
        while (e + 1 < same.size() && near(std::abs(across(same[e + 1][0], axis) - across(same[e][0], axis)), gap)) ++e;
        const std::size_t n = e - s + 1;
        const std::size_t size = n * same[s].size();
        if (!best || size > best->lines.size() * best->lines[0].size()) {
          Lattice lat;
          lat.lines.assign(same.begin() + static_cast<std::ptrdiff_t>(s), same.begin() + static_cast<std::ptrdiff_t>(e + 1));
          lat.step = step;
          lat.gap = gap;
          for (const auto& l : lat.lines) lat.shifted = lat.shifted || !near(along(l[0], axis), along(lat.lines[0][0], axis));
          best = std::move(lat);
        }
      }
    }
    return best;
  }

  void grids(const std::string& category) {
    const bool plain = library_.has_builtin("grid");
    const bool offsets = library_.has_builtin("grid_with_offset");
    for (bool again = true; again;) {
      again = false;
      for (const auto& group : size_groups(category)) {
        if (group.size() < 4) continue;
        std::optional<Lattice> rows_lat = find_lattice(group, 0);
        std::optional<Lattice> cols_lat = find_lattice(group, 1);
        const auto usable = [&](const std::optional<Lattice>& l) {
          return l && (l->shifted ? offsets : (plain || offsets));
        };
        const auto size = [](const std::optional<Lattice>& l) { return l ? l->lines.size() * l->lines[0].size() : 0; };
        if (usable(rows_lat) && (!usable(cols_lat) || size(rows_lat) >= size(cols_lat) ||
                                 (!rows_lat->shifted && cols_lat->shifted && size(rows_lat) == size(cols_lat)))) {
          emit_grid(category, *rows_lat, 0);
        } else if (usable(cols_lat)) {
          emit_grid(category, *cols_lat, 1);
        } else {
          continue;
        }
        again = true;
        break;
      }
    }
  }

  void emit_grid(const std::string& category, const Lattice& lat, int axis) {
    const bool plain_ok = library_.has_builtin("grid") && !lat.shifted;
    const std::size_t n_lines = lat.lines.size();
    const std::size_t per_line = lat.lines[0].size();
    const std::size_t rows = axis == 0 ? n_lines : per_line;
    const std::size_t cols = axis == 0 ? per_line : n_lines;
    const double h = axis == 0 ? lat.step : lat.gap;
    const double v = axis == 0 ? lat.gap : lat.step;
    // Cell (0,0) is the top-left object; for columns the lines run bottom to top.
    const std::size_t top_left = axis == 0 ? lat.lines[0][0] : lat.lines[0].back();
    const Aabb& first = box(top_left);
    const Vec2 shift{0.5 * static_cast<double>(cols - 1) * h, -0.5 * static_cast<double>(rows - 1) * v};
    const Aabb ref = first.translated(shift);

    const std::string ref_name = fresh_name(category);
    emit(ref_name, box_literal(ref));
    std::vector<Expr> args{dsl::var(ref_name), number(static_cast<double>(rows)), number(static_cast<double>(cols)),
                           number(h), number(v)};
    std::string callee = plain_ok ? "grid" : "grid_with_offset";
    if (lat.shifted) {
      std::vector<Expr> offs;
      for (const auto& l : lat.lines) {
        const std::size_t lead = axis == 0 ? l[0] : l.back();
        offs.push_back(number(axis == 0 ? box(lead).center().x - first.center().x
                                          : box(lead).center().y - first.center().y));
      }
      if (axis == 0) {
        args.push_back(dsl::list(std::move(offs)));
      } else {
        args.push_back(dsl::list({}));
        args.push_back(dsl::list(std::move(offs)));
      }
    }
    emit(fresh_name(category), dsl::call(callee, std::move(args)));
    for (const auto& l : lat.lines) take(l);
  }

  // Longest evenly spaced subsequence (length >= 3) of a sorted line.
  std::vector<std::size_t> longest_run(const std::vector<std::size_t>& line, int axis) const {
    std::vector<std::size_t> best;
    for (std::size_t i = 0; i < line.size(); ++i) {
      for (std::size_t j = i + 1; j < line.size(); ++j) {
        const double step = along(line[j], axis) - along(line[i], axis);
        if (!(step > kEps)) continue;
        std::vector<std::size_t> run{line[i], line[j]};
        double next = along(line[j], axis) + step;
        for (std::size_t k = j + 1; k < line.size(); ++k) {
          if (near(along(line[k], axis), next)) {
            run.push_back(line[k]);
            next += step;
          }
        }
        if (run.size() > best.size()) best = std::move(run);
      }
    }
    return best.size() >= 3 ? best : std::vector<std::size_t>{};
  }

  void rows(const std::string& category) {
    for (int axis : {0, 1}) {
      for (bool again = true; again;) {
        again = false;
        for (const auto& group : size_groups(category)) {
          for (const auto& line : lines(group, axis)) {
            const std::vector<std::size_t> run = longest_run(line, axis);
            if (run.empty()) continue;
            const double step = (along(run.back(), axis) - along(run[0], axis)) / static_cast<double>(run.size() - 1);
            const std::string ref_name = fresh_name(category);
            emit(ref_name, box_literal(box(run[0])));
            emit(fresh_name(category), dsl::call("align", {dsl::var(ref_name), number(static_cast<double>(run.size())),
                                                           number(step), number(axis == 0 ? 4.0 : 1.0)}));
            take(run);
            again = true;
            break;
          }
          if (again) break;
        }
      }
    }
  }

  void quadruples(const std::string& category) {
    for (bool again = true; again;) {
      again = false;
      for (const auto& group : size_groups(category)) {
        if (group.size() < 4) continue;
        const auto find_at = [&](double x, double y) -> std::optional<std::size_t> {
          for (std::size_t i : group) {
            if (residual_[i] && near(box(i).center().x, x) && near(box(i).center().y, y)) return i;
          }
          return std::nullopt;
        };
        for (std::size_t a : group) {
          for (std::size_t b : group) {
            const Vec2 ca = box(a).center(), cb = box(b).center();
            if (!(cb.x - ca.x > kEps) || !(cb.y - ca.y > kEps)) continue;
            const auto c = find_at(ca.x, cb.y);
            const auto d = find_at(cb.x, ca.y);
            if (!c || !d) continue;
            const Vec2 mid = 0.5 * (ca + cb);
            emit(fresh_name(category),
                 dsl::call("symmetrical", {pair_literal(mid.x, mid.y), number(0.5 * (cb.x - ca.x)),
                                           number(0.5 * (cb.y - ca.y)), pair_literal(box(a).width(), box(a).height())}));
            take({a, b, *c, *d});
            again = true;
            break;
          }
          if (again) break;
        }
        if (again) break;
      }
    }
  }

  void clusters(const std::string& category) {
    for (const auto& group : size_groups(category)) {
      if (group.size() < 2) continue;
      Vec2 centroid{0, 0};
      for (std::size_t i : group) centroid = centroid + box(i).center();
      centroid = (1.0 / static_cast<double>(group.size())) * centroid;
      const double member_area = box(group[0]).area();
      std::optional<std::size_t> anchor;
      double best = 0.0;
      for (std::size_t i = 0; i < layout_.objects.size(); ++i) {
        if (layout_.objects[i].category == category) continue;
        if (!residual_[i] && !vars_.count(i)) continue;
        if (!(box(i).area() > member_area)) continue;
        const double d = norm(box(i).center() - centroid);
        if (!anchor || d < best) {
          anchor = i;
          best = d;
        }
      }
      if (!anchor) continue;
      double spread = 0.0;
      for (std::size_t i : group) spread += norm(box(i).center() - box(*anchor).center());
      spread /= static_cast<double>(group.size());
      if (best > 0.5 * spread + kEps) continue;
      const std::string anchor_name = anchor_var(*anchor);
      std::vector<Expr> offsets;
      for (std::size_t i : group) {
        const Vec2 o = box(i).center() - box(*anchor).center();
        offsets.push_back(pair_literal(o.x, o.y));
      }
      std::vector<Expr> args{dsl::var(anchor_name), dsl::list(std::move(offsets))};
      if (!same_size(box(group[0]), box(*anchor))) args.push_back(pair_literal(box(group[0]).width(), box(group[0]).height()));
      emit(fresh_name(category), dsl::call("cluster_placement", std::move(args)));
      take(group);
    }
  }

  void pairs(const std::string& category) {
    const std::vector<std::size_t> rest = residual_of(category);
    if (rest.size() != 2) return;
    const Vec2 c0 = box(rest[0]).center(), c1 = box(rest[1]).center();
    std::size_t a = rest[0], b = rest[1];
    double direction = 0.0;
    if (near(c0.y, c1.y) && !near(c0.x, c1.x)) {
      if (c1.x < c0.x) std::swap(a, b);
      direction = 4.0;
    } else if (near(c0.x, c1.x) && !near(c0.y, c1.y)) {
      if (c1.y < c0.y) std::swap(a, b);
      direction = 1.0;
    } else {
      return;
    }
    const Vec2 ca = box(a).center(), cb = box(b).center();
    const double d = direction == 4.0 ? cb.x - ca.x : cb.y - ca.y;
    const std::string anchor_name = anchor_var(a);
    std::vector<Expr> args{dsl::var(anchor_name), number(d), number(direction)};
    if (!same_size(box(a), box(b))) args.push_back(pair_literal(box(b).width(), box(b).height()));
    const std::string name = fresh_name(category);
    emit(name, dsl::call("parallel", std::move(args)));
    vars_[b] = name;
    take({b});
  }

  const Layout& layout_;
  const Library& library_;
  std::vector<bool> residual_;
  std::vector<std::string> categories_;
  std::map<std::string, std::string> base_;
  std::map<std::string, int> counter_;
  std::map<std::size_t, std::string> vars_;
  dsl::Program program_;
};

}  // namespace

dsl::Program recognize_heuristic(const Layout& layout, const Library& library) {
  dsl::Program program = Builder(layout, library).run();
  for (const dsl::FuncDef& fn : library.functions) {
    try {
      program = rewrite_program(program, fn.name, library);
    } catch (const Error&) {
      // A function that cannot be probed simply does not take part.
    }
  }
  return program;
}

RecognitionResult score_recognition(const Layout& layout, const dsl::Program& program, const Library& library,
                                    double accept_threshold, RecognitionSource source) {
  RecognitionResult r;
  r.program = program;
  r.source = source;
  Room room{layout.room_bounds, layout.walls};
  r.miou = verify(layout, execute(program, library, room));
  r.accepted = r.miou >= accept_threshold;
  return r;
}

}  // namespace sceneforge
