#include "sceneforge/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "sceneforge/error.hpp"
#include "sceneforge/library.hpp"
#include "sceneforge/synth.hpp"

namespace sceneforge {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2",
                                    "#bcbd22", "#17becf", "#f2c12e", "#393b79", "#637939", "#ad494a", "#7b4173"};
constexpr const char* kOtherColor = "#888888";
constexpr double kPixelsPerMeter = 50.0;
constexpr double kMargin = 20.0;
constexpr double kLegendWidth = 150.0;
constexpr double kLegendRow = 16.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  return s == "-0.00" ? "0.00" : s;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

int category_slot(const std::string& category) {
  for (std::size_t i = 0; i < std::size(kSceneCategories); ++i)
    if (kSceneCategories[i] == category) return static_cast<int>(i);
  return static_cast<int>(std::size(kSceneCategories));
}

double layout_width(const Layout& l) { return l.room_bounds.width() * kPixelsPerMeter + 2 * kMargin; }
double layout_height(const Layout& l) { return l.room_bounds.height() * kPixelsPerMeter + 2 * kMargin; }

// Room and objects drawn with the room's top-left at (ox, oy).
std::string layout_body(const Layout& l, const std::map<int, double>* thetas, double ox, double oy) {
  const Aabb& r = l.room_bounds;
  const auto px = [&](double x) { return ox + kMargin + (x - r.x_min) * kPixelsPerMeter; };
  const auto py = [&](double y) { return oy + kMargin + (r.y_max - y) * kPixelsPerMeter; };
  std::string s;
  s += "<rect x=\"" + fmt(px(r.x_min)) + "\" y=\"" + fmt(py(r.y_max)) + "\" width=\"" +
       fmt(r.width() * kPixelsPerMeter) + "\" height=\"" + fmt(r.height() * kPixelsPerMeter) +
       "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"2\"/>\n";
  for (const auto& o : l.objects) {
    s += "<rect x=\"" + fmt(px(o.box.x_min)) + "\" y=\"" + fmt(py(o.box.y_max)) + "\" width=\"" +
         fmt(o.box.width() * kPixelsPerMeter) + "\" height=\"" + fmt(o.box.height() * kPixelsPerMeter) +
         "\" fill=\"" + category_color(o.category) + "\" fill-opacity=\"0.8\" stroke=\"#222222\"";
    if (thetas) {
      const auto it = thetas->find(o.id);
      if (it != thetas->end() && reduce_half_turn(it->second) != 0.0) {
        const Vec2 c = o.box.center();
        s += " transform=\"rotate(" + fmt(-reduce_half_turn(it->second)) + " " + fmt(px(c.x)) + " " + fmt(py(c.y)) +
             ")\"";
      }
    }
    s += "><title>" + escape(o.category) + " " + std::to_string(o.id) + "</title></rect>\n";
  }
  return s;
}

std::string legend(double x, double y) {
  std::string s;
  const auto row = [&](int i, const std::string& name, const char* color) {
    const double top = y + i * kLegendRow;
    s += "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(top) + "\" width=\"12\" height=\"12\" fill=\"" + color + "\"/>\n";
    s += "<text x=\"" + fmt(x + 18) + "\" y=\"" + fmt(top + 10) +
         "\" font-family=\"sans-serif\" font-size=\"11\">" + escape(name) + "</text>\n";
  };
  for (std::size_t i = 0; i < std::size(kSceneCategories); ++i)
    row(static_cast<int>(i), std::string(kSceneCategories[i]), kPalette[i]);
  row(static_cast<int>(std::size(kSceneCategories)), "other", kOtherColor);
  return s;
}

std::string document(double width, double height, const std::string& body) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
         "width=\"" +
         fmt(width) + "\" height=\"" + fmt(height) + "\" viewBox=\"0 0 " + fmt(width) + " " + fmt(height) +
         "\">\n<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n" + body + "</svg>\n";
}

double legend_height() { return (std::size(kSceneCategories) + 1) * kLegendRow + 2 * kMargin; }

}  // namespace

std::string category_color(const std::string& category) {
  const int slot = category_slot(category);
  return slot < static_cast<int>(std::size(kPalette)) ? kPalette[slot] : kOtherColor;
}

std::string render_svg(const Layout& layout, const std::map<int, double>* thetas) {
  const double w = layout_width(layout);
  const double h = std::max(layout_height(layout), legend_height());
  return document(w + kLegendWidth, h, layout_body(layout, thetas, 0, 0) + legend(w, kMargin));
}

std::string render_panel(std::span<const Layout> layouts, std::span<const std::map<int, double>> thetas) {
  if (!thetas.empty() && thetas.size() != layouts.size())
    throw Error("panel needs one angle map per layout or none");
  const std::size_t cols = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::sqrt(layouts.size()))));
  double cell_w = 0, cell_h = 0;
  for (const auto& l : layouts) {
    cell_w = std::max(cell_w, layout_width(l));
    cell_h = std::max(cell_h, layout_height(l));
  }
  std::string body;
  for (std::size_t i = 0; i < layouts.size(); ++i)
    body += layout_body(layouts[i], thetas.empty() ? nullptr : &thetas[i], static_cast<double>(i % cols) * cell_w,
                        static_cast<double>(i / cols) * cell_h);
  const std::size_t rows = layouts.empty() ? 0 : (layouts.size() + cols - 1) / cols;
  const double w = static_cast<double>(cols) * cell_w;
  const double h = std::max(static_cast<double>(rows) * cell_h, legend_height());
  return document(w + kLegendWidth, h, body + legend(w, kMargin));
}

std::vector<double> LayoutFeatures::vector() const {
  std::vector<double> v(category_histogram.begin(), category_histogram.end());
  v.push_back(nn_mean);
  v.push_back(nn_std);
  v.insert(v.end(), orientation_histogram.begin(), orientation_histogram.end());
  v.push_back(count);
  v.push_back(mean_area);
  return v;
}

LayoutFeatures layout_features(const Layout& layout, const std::map<int, double>& thetas) {
  LayoutFeatures f;
  const auto& objs = layout.objects;
  f.count = static_cast<double>(objs.size());
  std::vector<double> areas;
  for (const auto& o : objs) {
    f.category_histogram[static_cast<std::size_t>(category_slot(o.category))] += 1.0;
    const auto it = thetas.find(o.id);
    f.orientation_histogram[static_cast<std::size_t>(theta_to_bin(it == thetas.end() ? 0.0 : it->second).index())] +=
        1.0;
    areas.push_back(o.box.area());
  }
  // Sorted so the sums do not depend on object order.
  std::sort(areas.begin(), areas.end());
  double area = 0.0;
  for (double a : areas) area += a;
  if (!objs.empty()) f.mean_area = area / f.count;
  if (objs.size() >= 2) {
    std::vector<double> nn;
    for (std::size_t i = 0; i < objs.size(); ++i) {
      double best = INFINITY;
      for (std::size_t j = 0; j < objs.size(); ++j)
        if (i != j) best = std::min(best, norm(objs[i].box.center() - objs[j].box.center()));
      nn.push_back(best);
    }
    std::sort(nn.begin(), nn.end());
    double sum = 0.0;
    for (double d : nn) sum += d;
    f.nn_mean = sum / static_cast<double>(nn.size());
    double var = 0.0;
    for (double d : nn) var += (d - f.nn_mean) * (d - f.nn_mean);
    f.nn_std = std::sqrt(var / static_cast<double>(nn.size()));
  }
  return f;
}

double mmd(std::span<const LayoutFeatures> a, std::span<const LayoutFeatures> b, std::optional<double> bandwidth) {
  if (a.size() < 2 || b.size() < 2) throw Error("mmd needs at least 2 layouts per set");
  if (bandwidth && !(*bandwidth > 0)) throw Error("mmd bandwidth must be positive");
  std::vector<std::vector<double>> xs, ys;
  for (const auto& f : a) xs.push_back(f.vector());
  for (const auto& f : b) ys.push_back(f.vector());
  const std::size_t dim = xs[0].size();
  const double total = static_cast<double>(xs.size() + ys.size());
  for (std::size_t k = 0; k < dim; ++k) {
    double mean = 0.0;
    for (const auto& v : xs) mean += v[k];
    for (const auto& v : ys) mean += v[k];
    mean /= total;
    double var = 0.0;
    for (const auto& v : xs) var += (v[k] - mean) * (v[k] - mean);
    for (const auto& v : ys) var += (v[k] - mean) * (v[k] - mean);
    const double sd = std::sqrt(var / total);
    for (auto* set : {&xs, &ys})
      for (auto& v : *set) v[k] = sd > 0 ? (v[k] - mean) / sd : 0.0;
  }
  const auto dist2 = [&](const std::vector<double>& u, const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t k = 0; k < dim; ++k) s += (u[k] - v[k]) * (u[k] - v[k]);
    return s;
  };
  double sigma = bandwidth.value_or(0.0);
  if (!bandwidth) {
    std::vector<const std::vector<double>*> all;
    for (const auto& v : xs) all.push_back(&v);
    for (const auto& v : ys) all.push_back(&v);
    std::vector<double> d;
    for (std::size_t i = 0; i < all.size(); ++i)
      for (std::size_t j = i + 1; j < all.size(); ++j) d.push_back(std::sqrt(dist2(*all[i], *all[j])));
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2), d.end());
    sigma = d[d.size() / 2];
    if (!(sigma > 0)) sigma = 1.0;
  }
  const auto k = [&](const std::vector<double>& u, const std::vector<double>& v) {
    return std::exp(-dist2(u, v) / (2 * sigma * sigma));
  };
  const std::size_t m = xs.size(), n = ys.size();
  if (m == n) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (i != j) s += k(xs[i], xs[j]) + k(ys[i], ys[j]) - k(xs[i], ys[j]) - k(xs[j], ys[i]);
    return s / static_cast<double>(m * (m - 1));
  }
  double kxx = 0.0, kyy = 0.0, kxy = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (i != j) kxx += k(xs[i], xs[j]);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) kyy += k(ys[i], ys[j]);
  for (const auto& x : xs)
    for (const auto& y : ys) kxy += k(x, y);
  return kxx / static_cast<double>(m * (m - 1)) + kyy / static_cast<double>(n * (n - 1)) -
         2 * kxy / static_cast<double>(m * n);
}

namespace {

using CountDistribution = std::map<std::string, std::map<int, double>>;

CountDistribution count_distribution(std::span<const EvalItem> items, const std::set<std::string>& categories) {
  CountDistribution out;
  for (const auto& item : items) {
    std::map<std::string, int> counts;
    for (const auto& o : item.layout.objects) ++counts[o.category];
    for (const auto& c : categories) out[c][counts[c]] += 1.0 / static_cast<double>(items.size());
  }
  return out;
}

double total_variation(const std::map<int, double>& p, const std::map<int, double>& q) {
  std::set<int> keys;
  for (const auto& [k, v] : p) keys.insert(k);
  for (const auto& [k, v] : q) keys.insert(k);
  double s = 0.0;
  for (int k : keys) {
    const auto a = p.find(k), b = q.find(k);
    s += std::abs((a == p.end() ? 0.0 : a->second) - (b == q.end() ? 0.0 : b->second));
  }
  return 0.5 * s;
}

Json side_json(std::span<const EvalItem> items, const CountDistribution& dist) {
  std::vector<dsl::Program> programs;
  for (const auto& i : items) programs.push_back(i.program);
  Json counts = Json::object();
  for (const auto& [cat, d] : dist) {
    Json entry = Json::object();
    for (const auto& [n, frac] : d) entry[std::to_string(n)] = frac;
    counts[cat] = entry;
  }
  return {{"layouts", items.size()},
          {"funcs_per_program", funcs_per_program(programs)},
          {"mean_dl", mean_description_length(programs)},
          {"count_distributions", counts}};
}

}  // namespace

Json eval_report(std::span<const EvalItem> generated, std::span<const EvalItem> reference) {
  if (generated.empty() || reference.empty()) throw Error("evaluation needs layouts on both sides");
  std::set<std::string> categories;
  for (auto side : {generated, reference})
    for (const auto& item : side)
      for (const auto& o : item.layout.objects) categories.insert(o.category);
  const auto gen = count_distribution(generated, categories);
  const auto ref = count_distribution(reference, categories);
  Json divergence = Json::object();
  for (const auto& c : categories) divergence[c] = total_variation(gen.at(c), ref.at(c));

  Json report{{"schema", 1},
              {"generated", side_json(generated, gen)},
              {"reference", side_json(reference, ref)},
              {"count_divergence", divergence}};
  if (generated.size() >= 2 && reference.size() >= 2) {
    std::vector<LayoutFeatures> a, b;
    for (const auto& i : generated) a.push_back(layout_features(i.layout, i.thetas));
    for (const auto& i : reference) b.push_back(layout_features(i.layout, i.thetas));
    report["mmd"] = mmd(a, b);
  } else {
    report["mmd"] = nullptr;
  }
  return report;
}

void check_eval_report(const Json& r) {
  const auto need = [&](const Json& j, const char* key) -> const Json& {
    if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("report is missing '") + key + "'");
    return j.at(key);
  };
  if (need(r, "schema") != 1) throw FormatError("unsupported report schema");
  const Json& m = need(r, "mmd");
  if (!m.is_null() && !m.is_number()) throw FormatError("mmd must be a number or null");
  for (const char* side : {"generated", "reference"}) {
    const Json& s = need(r, side);
    for (const char* key : {"funcs_per_program", "mean_dl", "layouts"})
      if (!need(s, key).is_number()) throw FormatError(std::string(key) + " must be a number");
    if (!need(s, "count_distributions").is_object()) throw FormatError("count_distributions must be an object");
  }
  for (const auto& [k, v] : need(r, "count_divergence").items())
    if (!v.is_number()) throw FormatError("divergence of '" + k + "' must be a number");
}

}  // namespace sceneforge
