#include "sceneforge/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

namespace sceneforge::synth {

namespace {

using dsl::Expr;

class Gen {
 public:
  explicit Gen(std::mt19937_64& rng) : rng_(rng) {
    for (std::string_view c : kSceneCategories) pool_.emplace_back(c);
    std::shuffle(pool_.begin(), pool_.end(), rng_);
  }

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  // Uniform on the 0.05 grid within [lo, hi].
  double grid_value(double lo, double hi) {
    return std::round(std::uniform_real_distribution<double>(lo, hi)(rng_) * 20.0) / 20.0;
  }

  std::string take_category() {
    std::string c = pool_.back();
    pool_.pop_back();
    return c;
  }
  bool categories_left(std::size_t n) const { return pool_.size() >= n; }

  std::string name(const std::string& category) { return category + "_" + std::to_string(++count_[category]); }

  void emit(dsl::Program& p, const std::string& name, Expr e) { p.statements.push_back(dsl::assign(name, std::move(e))); }

  // A furniture literal of the given size somewhere in the room.
  Expr box(double w, double h) {
    const double x = grid_value(1.0, 17.0), y = grid_value(1.0, 17.0);
    return dsl::call("furniture", {dsl::num(x), dsl::num(y), dsl::num(x + w), dsl::num(y + h)});
  }

  double size() { return grid_value(0.3, 1.5); }
  double spacing(double extent) { return extent + grid_value(0.1, 1.0); }

 private:
  std::mt19937_64& rng_;
  std::vector<std::string> pool_;
  std::map<std::string, int> count_;
};

Expr pair_literal(double a, double b) { return dsl::tuple({dsl::num(a), dsl::num(b)}); }

void single(Gen& g, dsl::Program& p) {
  const std::string c = g.take_category();
  g.emit(p, g.name(c), g.box(g.size(), g.size()));
}

void parallel_pair(Gen& g, dsl::Program& p) {
  const std::string c = g.take_category();
  const double w = g.size(), h = g.size();
  const std::string a = g.name(c);
  g.emit(p, a, g.box(w, h));
  const int dir = g.pick(1, 4);
  std::vector<Expr> args{dsl::var(a), dsl::num(0), dsl::num(static_cast<double>(dir))};
  double w2 = w, h2 = h;
  if (g.pick(0, 1) == 1) {
    w2 = g.size();
    h2 = g.size();
    args.push_back(pair_literal(w2, h2));
  }
  const double extent = dir <= 2 ? std::max(h, h2) : std::max(w, w2);
  args[1] = dsl::num(g.spacing(extent));
  g.emit(p, g.name(c), dsl::call("parallel", std::move(args)));
}

void align_row(Gen& g, dsl::Program& p) {
  const std::string c = g.take_category();
  const double w = g.size(), h = g.size();
  const std::string a = g.name(c);
  g.emit(p, a, g.box(w, h));
  const int dir = g.pick(1, 4);
  const double d = g.spacing(dir <= 2 ? h : w);
  g.emit(p, g.name(c), dsl::call("align", {dsl::var(a), dsl::num(g.pick(3, 6)), dsl::num(d), dsl::num(dir)}));
}

void grid(Gen& g, dsl::Program& p, int offsets) {
  const std::string c = g.take_category();
  const double w = g.size(), h = g.size();
  const int rows = g.pick(2, 3), cols = g.pick(2, 4);
  const std::string a = g.name(c);
  g.emit(p, a, g.box(w, h));
  std::vector<Expr> args{dsl::var(a), dsl::num(rows), dsl::num(cols), dsl::num(g.spacing(w)), dsl::num(g.spacing(h))};
  if (offsets == 0) {
    g.emit(p, g.name(c), dsl::call("grid", std::move(args)));
    return;
  }
  const int n = offsets == 1 ? rows : cols;
  std::vector<Expr> off;
  for (int k = 0; k < n; ++k) off.push_back(dsl::num(k == 0 ? 0.0 : g.grid_value(-0.5, 0.5)));
  if (offsets == 1) {
    args.push_back(dsl::list(std::move(off)));
  } else {
    args.push_back(dsl::list({}));
    args.push_back(dsl::list(std::move(off)));
  }
  g.emit(p, g.name(c), dsl::call("grid_with_offset", std::move(args)));
}

void symmetric(Gen& g, dsl::Program& p) {
  const std::string c = g.take_category();
  const double w = g.size(), h = g.size();
  const double dx = 0.5 * g.spacing(w), dy = 0.5 * g.spacing(h);
  const Expr center = pair_literal(g.grid_value(3.0, 17.0), g.grid_value(3.0, 17.0));
  g.emit(p, g.name(c), dsl::call("symmetrical", {center, dsl::num(dx), dsl::num(dy), pair_literal(w, h)}));
}

void cluster(Gen& g, dsl::Program& p) {
  const std::string anchor_category = g.take_category();
  const std::string member_category = g.take_category();
  const double aw = g.grid_value(1.0, 2.5), ah = g.grid_value(1.0, 2.5);
  const std::string a = g.name(anchor_category);
  g.emit(p, a, g.box(aw, ah));
  const double mw = g.grid_value(0.3, 0.6), mh = g.grid_value(0.3, 0.6);
  // Members mirrored through the anchor center so their centroid is the anchor.
  std::vector<Expr> offsets;
  const int pairs = g.pick(1, 3);
  for (int k = 0; k < pairs; ++k) {
    const double ox = g.grid_value(-2.0, 2.0), oy = g.grid_value(-2.0, 2.0);
    offsets.push_back(pair_literal(ox, oy));
    offsets.push_back(pair_literal(-ox, -oy));
  }
  g.emit(p, g.name(member_category),
         dsl::call("cluster_placement", {dsl::var(a), dsl::list(std::move(offsets)), pair_literal(mw, mh)}));
}

}  // namespace

Room room() { return Room::rectangular({0.0, 0.0, 20.0, 20.0}); }

dsl::Program stdlib_program(std::mt19937_64& rng, int max_patterns) {
  Gen g(rng);
  dsl::Program p;
  const int n = g.pick(1, std::max(1, max_patterns));
  for (int i = 0; i < n; ++i) {
    switch (g.pick(0, 7)) {
      case 0: single(g, p); break;
      case 1: parallel_pair(g, p); break;
      case 2: align_row(g, p); break;
      case 3: grid(g, p, 0); break;
      case 4: grid(g, p, 1); break;
      case 5: grid(g, p, 2); break;
      case 6: symmetric(g, p); break;
      default:
        if (g.categories_left(2)) cluster(g, p);
        break;
    }
  }
  return p;
}

dsl::Program grid_row_program(std::mt19937_64& rng) {
  Gen g(rng);
  dsl::Program p;
  const int n = g.pick(1, 3);
  for (int i = 0; i < n; ++i) {
    if (g.pick(0, 1) == 0) {
      grid(g, p, 0);
    } else {
      align_row(g, p);
    }
  }
  const int singles = g.pick(0, 2);
  for (int i = 0; i < singles; ++i) single(g, p);
  return p;
}

dsl::Program themed_program(std::mt19937_64& rng, Theme theme) {
  Gen g(rng);
  dsl::Program p;
  const auto lone = [&](const std::string& category, double w, double h) { g.emit(p, g.name(category), g.box(w, h)); };
  if (theme == Theme::kBedroom) {
    const double bw = g.grid_value(1.4, 2.0), bh = g.grid_value(1.9, 2.2);
    const std::string bed = g.name("bed");
    g.emit(p, bed, g.box(bw, bh));
    const double side = g.grid_value(0.4, 0.6);
    const double apart = 0.5 * (bw + side) + g.grid_value(0.05, 0.2);
    for (int dir : {3, 4})
      if (dir == 3 || g.pick(0, 1) == 1)
        g.emit(p, g.name("nightstand"),
               dsl::call("parallel", {dsl::var(bed), dsl::num(apart), dsl::num(dir), pair_literal(side, side)}));
    lone("dresser", g.grid_value(1.0, 1.6), g.grid_value(0.4, 0.6));
    if (g.pick(0, 1) == 1) lone("lamp", 0.3, 0.3);
    if (g.pick(0, 1) == 1) lone("cabinet", g.grid_value(0.6, 1.0), g.grid_value(0.4, 0.6));
    if (g.pick(0, 2) == 0) lone("shelf", g.grid_value(0.8, 1.2), 0.3);
    return p;
  }
  const double cw = g.grid_value(1.8, 2.6), ch = g.grid_value(0.8, 1.0);
  const std::string couch = g.name("couch");
  g.emit(p, couch, g.box(cw, ch));
  const double tw = g.grid_value(0.8, 1.2), th = g.grid_value(0.5, 0.7);
  g.emit(p, g.name("coffee_table"),
         dsl::call("parallel", {dsl::var(couch), dsl::num(0.5 * (ch + th) + g.grid_value(0.3, 0.6)), dsl::num(1),
                                pair_literal(tw, th)}));
  const int armchairs = g.pick(1, 2);
  for (int i = 0; i < armchairs; ++i) lone("armchair", 0.8, 0.8);
  lone("bookshelf", g.grid_value(0.8, 1.4), 0.35);
  if (g.pick(0, 1) == 1) {
    const std::string table = g.name("table");
    g.emit(p, table, g.box(g.grid_value(1.2, 1.6), g.grid_value(0.8, 1.0)));
    g.emit(p, g.name("chair"),
           dsl::call("cluster_placement",
                     {dsl::var(table), dsl::list({pair_literal(0.0, 0.9), pair_literal(0.0, -0.9)}),
                      pair_literal(0.45, 0.45)}));
  }
  if (g.pick(0, 1) == 1) lone("stool", 0.4, 0.4);
  return p;
}

}  // namespace sceneforge::synth
