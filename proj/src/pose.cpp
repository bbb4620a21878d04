#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "pose_internal.hpp"
#include "sceneforge/error.hpp"
#include "sceneforge/library.hpp"

namespace sceneforge {

using Eigen::MatrixXd;
using pose_detail::SceneInput;

std::vector<std::optional<GroundTruth>> extract_gt(std::span<const ScanObject> objects,
                                                    std::vector<std::string>* warnings) {
  std::vector<std::optional<GroundTruth>> out;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const ScanObject& o = objects[i];
    try {
      const OrientationFit fit = min_area_orientation(o.points);
      GroundTruth g;
      g.theta = fit.theta;
      g.bin = theta_to_bin(fit.theta);
      g.box = Aabb::bounding(o.points);
      const double a = fit.box.half_extents.x, b = fit.box.half_extents.y;
      g.low_confidence = std::max(a, b) < kLowConfidenceAspect * std::min(a, b);
      out.push_back(g);
    } catch (const GeometryError& e) {
      if (warnings) warnings->push_back("object " + std::to_string(i) + " (" + o.category + ") skipped: " + e.what());
      out.push_back(std::nullopt);
    }
  }
  return out;
}

std::vector<int> PoseExample::primary_ids() const {
  std::vector<int> ids;
  for (const PlacedObject& o : layout.objects) {
    if (o.role == Role::kPrimary) ids.push_back(o.id);
  }
  return ids;
}

std::vector<int> PoseExample::dependent_ids() const {
  std::vector<int> ids;
  for (const PlacedObject& o : layout.objects) {
    if (o.role == Role::kDependent) ids.push_back(o.id);
  }
  return ids;
}

namespace {

std::map<int, std::size_t> index_by_id(const Layout& layout) {
  std::map<int, std::size_t> m;
  for (std::size_t i = 0; i < layout.objects.size(); ++i) {
    if (!m.emplace(layout.objects[i].id, i).second) {
      throw FormatError("duplicate object id " + std::to_string(layout.objects[i].id));
    }
  }
  return m;
}

// Dependents grouped into waves whose targets are all resolved by earlier waves.
std::vector<std::vector<std::size_t>> dependency_waves(const Layout& layout) {
  const auto index = index_by_id(layout);
  std::set<int> known;
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < layout.objects.size(); ++i) {
    const PlacedObject& o = layout.objects[i];
    if (o.role == Role::kPrimary) {
      known.insert(o.id);
    } else {
      if (!o.dependency_target || !index.count(*o.dependency_target)) {
        throw FormatError("object " + std::to_string(o.id) + " depends on a missing object");
      }
      pending.push_back(i);
    }
  }
  std::vector<std::vector<std::size_t>> waves;
  while (!pending.empty()) {
    std::vector<std::size_t> ready, rest;
    for (std::size_t i : pending) {
      (known.count(*layout.objects[i].dependency_target) ? ready : rest).push_back(i);
    }
    if (ready.empty()) throw FormatError("dependency cycle among objects");
    for (std::size_t i : ready) known.insert(layout.objects[i].id);
    waves.push_back(std::move(ready));
    pending = std::move(rest);
  }
  return waves;
}

std::vector<std::size_t> role_indices(const Layout& layout, Role role) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < layout.objects.size(); ++i) {
    if (layout.objects[i].role == role) out.push_back(i);
  }
  return out;
}

std::map<int, double> label_thetas(const PoseExample& e) {
  std::map<int, double> t;
  for (std::size_t i = 0; i < e.layout.objects.size(); ++i) t[e.layout.objects[i].id] = bin_to_theta(e.labels[i]);
  return t;
}

}  // namespace

void validate(const PoseExample& example) {
  if (example.labels.size() != example.layout.objects.size()) {
    throw FormatError("pose example: expected " + std::to_string(example.layout.objects.size()) + " labels, got " +
                      std::to_string(example.labels.size()));
  }
  if (example.low_confidence.size() != example.labels.size()) {
    throw FormatError("pose example: low_confidence must have one flag per object");
  }
  dependency_waves(example.layout);
}

Json to_json(const PoseExample& example) {
  Json labels = Json::array(), low = Json::array(), deps = Json::array();
  for (std::size_t i = 0; i < example.labels.size(); ++i) {
    labels.push_back(example.labels[i].index());
    low.push_back(static_cast<bool>(example.low_confidence[i]));
  }
  for (const PlacedObject& o : example.layout.objects) {
    if (o.role == Role::kDependent) {
      deps.push_back({{"id", o.id}, {"target_id", *o.dependency_target}, {"call", o.instantiating_call}});
    }
  }
  return {{"layout", to_json(example.layout)},
          {"labels", labels},
          {"low_confidence", low},
          {"primary_ids", example.primary_ids()},
          {"dependent_ids", example.dependent_ids()},
          {"dependencies", deps}};
}

PoseExample pose_example_from_json(const Json& j) {
  try {
    PoseExample e;
    e.layout = layout_from_json(j.at("layout"));
    for (const Json& b : j.at("labels")) {
      const int k = b.get<int>();
      if (k < 0 || k >= OrientationBin::kCount) throw FormatError("label " + std::to_string(k) + " is not a bin");
      e.labels.emplace_back(k);
    }
    if (j.contains("low_confidence")) {
      for (const Json& f : j.at("low_confidence")) e.low_confidence.push_back(f.get<bool>());
    } else {
      e.low_confidence.assign(e.labels.size(), false);
    }
    if (j.contains("primary_ids") && j.at("primary_ids").get<std::vector<int>>() != e.primary_ids()) {
      throw FormatError("primary_ids disagree with object roles");
    }
    validate(e);
    return e;
  } catch (const Json::exception& ex) {
    throw FormatError(std::string("pose example: ") + ex.what());
  }
}

std::string pose_dataset_to_jsonl(std::span<const PoseExample> dataset) {
  std::string out;
  for (const PoseExample& e : dataset) out += round_floats(to_json(e)).dump() + "\n";
  return out;
}

std::vector<PoseExample> pose_dataset_from_jsonl(const std::string& text) {
  std::vector<PoseExample> out;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(pose_example_from_json(parse_json(line, "pose dataset line " + std::to_string(n))));
    } catch (const FormatError& e) {
      throw FormatError("pose dataset line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

std::vector<PoseExample> synthetic_pose_dataset(std::size_t scenes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Room room = Room::rectangular({0.0, 0.0, 10.0, 10.0});
  const Library lib = Library::standard();
  std::vector<PoseExample> out;
  for (std::size_t s = 0; s < scenes; ++s) {
    dsl::Program p;
    std::vector<double> thetas;  // per table, in statement order
    std::vector<Vec2> centers;
    const int tables = 1 + static_cast<int>(u(rng) * 2.0);
    for (int t = 0; t < tables; ++t) {
      const double w = 1.2 + 0.8 * u(rng), h = 0.7 + 0.3 * u(rng);
      const double theta = 180.0 * u(rng);
      Vec2 c;
      for (int attempt = 0; attempt < 50; ++attempt) {
        c = {2.5 + 5.0 * u(rng), 2.5 + 5.0 * u(rng)};
        bool clear = true;
        for (Vec2 o : centers) clear = clear && norm(c - o) > 3.5;
        if (clear) break;
      }
      centers.push_back(c);
      const OrientedBox table{c, {0.5 * w, 0.5 * h}, theta};
      const auto corners = table.corners();
      const Aabb tb = Aabb::bounding(corners);
      const OrientedBox chair{{0, 0}, {0.25, 0.225}, theta};
      const auto cc = chair.corners();
      const Aabb chair_box = Aabb::bounding(cc);
      const Vec2 slots[] = {{0, 0.5 * h + 0.35}, {0, -0.5 * h - 0.35}, {0.5 * w + 0.35, 0}, {-0.5 * w - 0.35, 0}};
      const int chairs = 2 + static_cast<int>(u(rng) * 3.0);
      std::vector<dsl::Expr> offsets;
      for (int k = 0; k < chairs; ++k) {
        const Vec2 o = rotate(slots[k], theta);
        offsets.push_back(dsl::tuple({dsl::num(o.x), dsl::num(o.y)}));
      }
      const std::string tname = "table_" + std::to_string(t + 1);
      p.statements.push_back(dsl::assign(
          tname, dsl::call("furniture", {dsl::num(tb.x_min), dsl::num(tb.y_min), dsl::num(tb.x_max), dsl::num(tb.y_max)})));
      p.statements.push_back(dsl::assign(
          "chair_" + std::to_string(t + 1),
          dsl::call("cluster_placement", {dsl::var(tname), dsl::list(std::move(offsets)),
                                          dsl::tuple({dsl::num(chair_box.width()), dsl::num(chair_box.height())})})));
      thetas.push_back(theta);
    }
    PoseExample e;
    e.layout = execute(p, lib, room);
    std::map<int, double> by_id;
    std::size_t table = 0;
    for (const PlacedObject& o : e.layout.objects) {
      if (o.role == Role::kPrimary) by_id[o.id] = thetas[table++];
    }
    for (const PlacedObject& o : e.layout.objects) {
      const double t = o.role == Role::kPrimary ? by_id.at(o.id) : by_id.at(*o.dependency_target);
      e.labels.push_back(theta_to_bin(t));
      e.low_confidence.push_back(false);
    }
    out.push_back(std::move(e));
  }
  return out;
}

MatrixXd forward_primary(const PoseModel& model, const PoseExample& example) {
  const std::vector<std::size_t> primaries = role_indices(example.layout, Role::kPrimary);
  if (primaries.empty()) return MatrixXd(0, OrientationBin::kCount);
  return pose_detail::forward(model, pose_detail::scene_input(example.layout, primaries, {}, nullptr), nullptr);
}

MatrixXd forward_dependent(const PoseModel& model, const PoseExample& example, const std::map<int, double>& thetas) {
  const std::vector<std::size_t> primaries = role_indices(example.layout, Role::kPrimary);
  const std::vector<std::size_t> dependents = role_indices(example.layout, Role::kDependent);
  if (dependents.empty()) return MatrixXd(0, OrientationBin::kCount);
  const SceneInput in = pose_detail::scene_input(example.layout, primaries, dependents, &thetas);
  const MatrixXd all = pose_detail::forward(model, in, nullptr);
  return all.bottomRows(static_cast<Eigen::Index>(dependents.size()));
}

double cross_entropy(const MatrixXd& logits, std::span<const int> bins) {
  if (static_cast<std::size_t>(logits.rows()) != bins.size()) throw Error("cross_entropy: one bin per row expected");
  double loss = 0.0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double mx = logits.row(i).maxCoeff();
    const double lse = mx + std::log((logits.row(i).array() - mx).exp().sum());
    loss += lse - logits(i, bins[static_cast<std::size_t>(i)]);
  }
  return loss;
}

double pose_loss(const MatrixXd& primary_logits, const MatrixXd& dependent_logits, std::span<const int> primary_bins,
                 std::span<const int> dependent_bins) {
  return cross_entropy(primary_logits, primary_bins) + cross_entropy(dependent_logits, dependent_bins);
}

namespace {

struct Prepared {
  SceneInput input;
  std::vector<int> bins;  // slot order
};

Prepared prepare(const PoseExample& e) {
  const std::vector<std::size_t> primaries = role_indices(e.layout, Role::kPrimary);
  const std::vector<std::size_t> dependents = role_indices(e.layout, Role::kDependent);
  const std::map<int, double> thetas = label_thetas(e);
  Prepared p{pose_detail::scene_input(e.layout, primaries, dependents, &thetas), {}};
  for (std::size_t i : primaries) p.bins.push_back(e.labels[i].index());
  for (std::size_t i : dependents) p.bins.push_back(e.labels[i].index());
  return p;
}

}  // namespace

double example_loss(const PoseModel& model, const PoseExample& example) {
  if (example.layout.objects.empty()) return 0.0;
  const Prepared p = prepare(example);
  return cross_entropy(pose_detail::forward(model, p.input, nullptr), p.bins);
}

double example_loss_and_gradient(const PoseModel& model, const PoseExample& example, PoseModel& grad) {
  if (example.layout.objects.empty()) return 0.0;
  const Prepared p = prepare(example);
  pose_detail::Cache cache;
  const MatrixXd logits = pose_detail::forward(model, p.input, &cache);
  MatrixXd dlogits(logits.rows(), logits.cols());
  double loss = 0.0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double mx = logits.row(i).maxCoeff();
    const Eigen::RowVectorXd e = (logits.row(i).array() - mx).exp().matrix();
    const double z = e.sum();
    loss += mx + std::log(z) - logits(i, p.bins[static_cast<std::size_t>(i)]);
    dlogits.row(i) = e / z;
    dlogits(i, p.bins[static_cast<std::size_t>(i)]) -= 1.0;
  }
  pose_detail::backward(model, p.input, cache, dlogits, grad);
  return loss;
}

std::vector<std::size_t> sampling_pool(std::span<const PoseExample> dataset, const TrainConfig& config) {
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const PoseExample& e = dataset[i];
    std::size_t off_axis = 0;
    for (const OrientationBin& b : e.labels) off_axis += b.index() != 0;
    const bool difficult = !e.labels.empty() && static_cast<double>(off_axis) / static_cast<double>(e.labels.size()) >
                                                    config.upsample_threshold;
    const int copies = difficult ? std::max(1, config.upsample_factor) : 1;
    for (int k = 0; k < copies; ++k) pool.push_back(i);
  }
  return pool;
}

PoseModel train_pose(std::span<const PoseExample> dataset, const PoseHyper& hyper, const TrainConfig& config,
                     TrainLog* log) {
  if (dataset.empty()) throw Error("train_pose: empty dataset");
  if (!(config.learning_rate > 0)) throw Error("train_pose: learning_rate must be positive");
  if (config.batch_size < 1 || config.steps < 0) throw Error("train_pose: batch_size must be >= 1 and steps >= 0");
  for (const PoseExample& e : dataset) validate(e);

  PoseModel model = PoseModel::init(hyper, config.seed);
  PoseModel m = PoseModel::zeros_like(model), v = PoseModel::zeros_like(model);
  const std::vector<std::size_t> pool = sampling_pool(dataset, config);
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;

  for (int step = 1; step <= config.steps; ++step) {
    PoseModel grad = PoseModel::zeros_like(model);
    double loss = 0.0;
    for (int b = 0; b < config.batch_size; ++b) loss += example_loss_and_gradient(model, dataset[pool[pick(rng)]], grad);
    loss /= config.batch_size;
    if (!std::isfinite(loss)) {
      throw Error("train_pose: loss became " + std::to_string(loss) + " at step " + std::to_string(step) +
                  "; try a smaller learning rate");
    }
    if (log) log->losses.push_back(loss);
    const double c1 = 1.0 - std::pow(b1, step), c2 = 1.0 - std::pow(b2, step);
    for (std::size_t t = 0; t < model.tensor_count(); ++t) {
      const MatrixXd g = grad.tensor(t) / static_cast<double>(config.batch_size);
      m.tensor(t) = b1 * m.tensor(t) + (1.0 - b1) * g;
      v.tensor(t) = b2 * v.tensor(t) + (1.0 - b2) * g.cwiseProduct(g);
      model.tensor(t).array() -=
          config.learning_rate * (m.tensor(t).array() / c1) / ((v.tensor(t).array() / c2).sqrt() + eps);
    }
  }
  return model;
}

int argmax_bin(const Eigen::Ref<const Eigen::RowVectorXd>& logits) {
  int best = 0;
  for (int k = 1; k < logits.size(); ++k) {
    if (logits(k) > logits(best)) best = k;
  }
  return best;
}

std::map<int, double> predict_pose(const PoseModel& model, const Layout& layout) {
  std::map<int, double> thetas;
  const std::vector<std::size_t> primaries = role_indices(layout, Role::kPrimary);
  const auto waves = dependency_waves(layout);
  if (!primaries.empty()) {
    const MatrixXd lp = pose_detail::forward(model, pose_detail::scene_input(layout, primaries, {}, nullptr), nullptr);
    for (std::size_t k = 0; k < primaries.size(); ++k) {
      thetas[layout.objects[primaries[k]].id] = 5.0 * argmax_bin(lp.row(static_cast<Eigen::Index>(k)));
    }
  }
  std::vector<std::size_t> seen;
  for (const auto& wave : waves) {
    const std::size_t before = seen.size();
    seen.insert(seen.end(), wave.begin(), wave.end());
    const MatrixXd ld =
        pose_detail::forward(model, pose_detail::scene_input(layout, primaries, seen, &thetas), nullptr);
    for (std::size_t k = before; k < seen.size(); ++k) {
      thetas[layout.objects[seen[k]].id] =
          5.0 * argmax_bin(ld.row(static_cast<Eigen::Index>(primaries.size() + k)));
    }
  }
  return thetas;
}

PoseMetrics pose_metrics(const std::map<int, double>& predicted, const PoseExample& example) {
  PoseMetrics m;
  std::size_t np = 0, nd = 0, hp = 0, hd = 0;
  double iou_sum = 0.0;
  for (std::size_t i = 0; i < example.layout.objects.size(); ++i) {
    const PlacedObject& o = example.layout.objects[i];
    const auto it = predicted.find(o.id);
    if (it == predicted.end()) throw Error("no predicted angle for object " + std::to_string(o.id));
    const bool hit = theta_to_bin(it->second) == example.labels[i];
    iou_sum += oriented_iou(OrientedBox::from_aabb(o.box, it->second),
                            OrientedBox::from_aabb(o.box, bin_to_theta(example.labels[i])));
    if (example.low_confidence[i]) continue;
    if (o.role == Role::kPrimary) {
      ++np;
      hp += hit;
    } else {
      ++nd;
      hd += hit;
    }
  }
  m.primary_accuracy = np ? static_cast<double>(hp) / static_cast<double>(np) : 0.0;
  m.dependent_accuracy = nd ? static_cast<double>(hd) / static_cast<double>(nd) : 0.0;
  m.mean_iou = example.layout.objects.empty() ? 0.0 : iou_sum / static_cast<double>(example.layout.objects.size());
  return m;
}

double teacher_forced_dependent_accuracy(const PoseModel& model, std::span<const PoseExample> dataset) {
  std::size_t total = 0, hits = 0;
  for (const PoseExample& e : dataset) {
    const MatrixXd logits = forward_dependent(model, e, label_thetas(e));
    const std::vector<std::size_t> dependents = role_indices(e.layout, Role::kDependent);
    for (std::size_t k = 0; k < dependents.size(); ++k) {
      if (e.low_confidence[dependents[k]]) continue;
      ++total;
      hits += argmax_bin(logits.row(static_cast<Eigen::Index>(k))) == e.labels[dependents[k]].index();
    }
  }
  return total ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
}

}  // namespace sceneforge
