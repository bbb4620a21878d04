#include "sceneforge/verify.hpp"

#include <algorithm>
#include <limits>
#include <map>

namespace sceneforge {

std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weights) {
  const std::size_t rows = weights.size();
  if (rows == 0) return {};
  const std::size_t cols = weights[0].size();
  const std::size_t n = std::max(rows, cols);
  // Kuhn-Munkres on the padded square cost matrix (cost = -weight), 1-based potentials.
  const double inf = std::numeric_limits<double>::infinity();
  auto cost = [&](std::size_t i, std::size_t j) {
    return (i < rows && j < cols) ? -weights[i][j] : 0.0;
  };
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> match(rows, -1);
  for (std::size_t j = 1; j <= n; ++j) {
    if (p[j] >= 1 && p[j] - 1 < rows && j - 1 < cols) match[p[j] - 1] = static_cast<int>(j - 1);
  }
  return match;
}

double verify(const Layout& target, const Layout& predicted) {
  const std::size_t denom = std::max(target.objects.size(), predicted.objects.size());
  if (denom == 0) return 1.0;
  std::map<std::string, std::pair<std::vector<const Aabb*>, std::vector<const Aabb*>>> by_category;
  for (const PlacedObject& o : target.objects) by_category[o.category].first.push_back(&o.box);
  for (const PlacedObject& o : predicted.objects) by_category[o.category].second.push_back(&o.box);
  double total = 0.0;
  for (const auto& [category, sides] : by_category) {
    const auto& [t, p] = sides;
    if (t.empty() || p.empty()) continue;
    std::vector<std::vector<double>> w(t.size(), std::vector<double>(p.size()));
    for (std::size_t i = 0; i < t.size(); ++i) {
      for (std::size_t j = 0; j < p.size(); ++j) w[i][j] = iou(*t[i], *p[j]);
    }
    const std::vector<int> match = max_weight_assignment(w);
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (match[i] >= 0) total += w[i][static_cast<std::size_t>(match[i])];
    }
  }
  return total / static_cast<double>(denom);
}

}  // namespace sceneforge
