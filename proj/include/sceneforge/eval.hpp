#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sceneforge/dsl.hpp"
#include "sceneforge/interp.hpp"
#include "sceneforge/io.hpp"

namespace sceneforge {

/// Fill color of a category; anything outside the fourteen scene
/// categories is gray.
std::string category_color(const std::string& category);

/// SVG 1.1 drawing: room outline, one filled rectangle per object (rotated
/// about its center when an angle is given), and a legend of every
/// category color. y grows upward in the layout and is flipped for display.
std::string render_svg(const Layout& layout, const std::map<int, double>* thetas = nullptr);

/// Several layouts side by side in one drawing.
std::string render_panel(std::span<const Layout> layouts, std::span<const std::map<int, double>> thetas = {});

struct LayoutFeatures {
  /// Fourteen scene categories then "other".
  std::array<double, 15> category_histogram{};
  double nn_mean = 0.0;
  double nn_std = 0.0;
  std::array<double, 36> orientation_histogram{};
  double count = 0.0;
  double mean_area = 0.0;

  std::vector<double> vector() const;
};

/// Objects without an angle fall in bin 0.
LayoutFeatures layout_features(const Layout& layout, const std::map<int, double>& thetas = {});

/// Unbiased squared MMD with a Gaussian kernel on features z-scored over
/// both sets. The bandwidth defaults to the median pairwise distance.
/// Equal-sized sets use the paired statistic, which is exactly zero for
/// identical sets. Throws Error when either set has fewer than 2 members.
double mmd(std::span<const LayoutFeatures> a, std::span<const LayoutFeatures> b,
           std::optional<double> bandwidth = std::nullopt);

struct EvalItem {
  Layout layout;
  std::map<int, double> thetas;
  dsl::Program program;
};

/// `schema`, `mmd` (null when a side has fewer than 2 layouts),
/// per-side `funcs_per_program`, `mean_dl`, `count_distributions`
/// (category -> objects per layout -> fraction of layouts), and
/// `count_divergence` (category -> total variation between the two sides).
Json eval_report(std::span<const EvalItem> generated, std::span<const EvalItem> reference);

/// Throws FormatError unless the report has the expected fields.
void check_eval_report(const Json& report);

}  // namespace sceneforge
