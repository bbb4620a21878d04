#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sceneforge/geometry.hpp"
#include "sceneforge/interp.hpp"
#include "sceneforge/io.hpp"

namespace sceneforge {

// Ground-truth orientation from raw footprints.

struct ScanObject {
  std::string category;
  std::vector<Vec2> points;
};

struct GroundTruth {
  double theta = 0.0;
  OrientationBin bin{0};
  /// Axis-aligned bounds of the raw points.
  Aabb box;
  /// Aspect ratio below kLowConfidenceAspect: the tightest-box angle is
  /// ambiguous up to a quarter turn.
  bool low_confidence = false;
};

inline constexpr double kLowConfidenceAspect = 1.1;

/// One entry per object; degenerate point sets yield nullopt and a warning.
std::vector<std::optional<GroundTruth>> extract_gt(std::span<const ScanObject> objects,
                                                    std::vector<std::string>* warnings = nullptr);

struct PoseExample {
  Layout layout;
  /// Bin per object, aligned with layout.objects.
  std::vector<OrientationBin> labels;
  /// Objects excluded from accuracy metrics.
  std::vector<bool> low_confidence;

  std::vector<int> primary_ids() const;
  std::vector<int> dependent_ids() const;
};

/// Throws FormatError unless labels cover every object and dependency
/// targets exist without cycles.
void validate(const PoseExample& example);

Json to_json(const PoseExample& example);
PoseExample pose_example_from_json(const Json& j);
/// JSON lines, one example per line.
std::string pose_dataset_to_jsonl(std::span<const PoseExample> dataset);
std::vector<PoseExample> pose_dataset_from_jsonl(const std::string& text);

/// Scenes of tables at uniform random orientation, each ringed by chairs
/// placed by cluster_placement; every chair carries its table's bin.
std::vector<PoseExample> synthetic_pose_dataset(std::size_t scenes, std::uint64_t seed);

// Model.

inline constexpr int kCategoryVocab = 15;  // the scene categories plus "other"
inline constexpr int kCallBuckets = 256;

int category_index(const std::string& category);
/// Hashed token buckets of a canonical call string. Every numeric literal
/// maps to the same token.
std::vector<int> call_tokens(const std::string& call);

struct PoseHyper {
  int d = 128;
  int heads = 4;
  int layers = 2;
  int ffn = 256;
  /// When false the target-angle and call-text encodings are left out.
  bool dependency_conditioning = true;
};

class PoseModel {
 public:
  PoseModel() = default;
  static PoseModel init(const PoseHyper& hyper, std::uint64_t seed);
  /// Same shapes, all zeros.
  static PoseModel zeros_like(const PoseModel& model);

  const PoseHyper& hyper() const { return hyper_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t tensor_count() const { return tensors_.size(); }
  const std::string& name(std::size_t i) const { return names_[i]; }
  Eigen::MatrixXd& tensor(std::size_t i) { return tensors_[i]; }
  const Eigen::MatrixXd& tensor(std::size_t i) const { return tensors_[i]; }
  std::size_t parameter_count() const;

  /// Manifest JSON at `path` plus raw little-endian doubles at `path` + ".bin".
  void save(const std::filesystem::path& path) const;
  static PoseModel load(const std::filesystem::path& path);

  friend bool operator==(const PoseModel& a, const PoseModel& b);

 private:
  PoseHyper hyper_;
  std::uint64_t seed_ = 0;
  std::vector<std::string> names_;
  std::vector<Eigen::MatrixXd> tensors_;
};

inline bool operator==(const PoseHyper& a, const PoseHyper& b) {
  return a.d == b.d && a.heads == b.heads && a.layers == b.layers && a.ffn == b.ffn &&
         a.dependency_conditioning == b.dependency_conditioning;
}

/// Primary and dependent slots share the input encoders; each attention
/// layer and the output head have separate weights per stage. Primary slots
/// attend to primaries only, dependent slots to every slot.

/// 36 logits per primary object, rows in primary_ids() order.
Eigen::MatrixXd forward_primary(const PoseModel& model, const PoseExample& example);
/// 36 logits per dependent object, rows in dependent_ids() order. Every
/// dependent's target must have an entry in `thetas` (degrees by id).
Eigen::MatrixXd forward_dependent(const PoseModel& model, const PoseExample& example,
                                  const std::map<int, double>& thetas);

/// Summed cross-entropy of logits rows against bins.
double cross_entropy(const Eigen::MatrixXd& logits, std::span<const int> bins);
/// Primary plus dependent stage loss.
double pose_loss(const Eigen::MatrixXd& primary_logits, const Eigen::MatrixXd& dependent_logits,
                 std::span<const int> primary_bins, std::span<const int> dependent_bins);

/// Two-stage loss with teacher forcing (targets use ground-truth angles).
double example_loss(const PoseModel& model, const PoseExample& example);
/// Same loss; gradients are added into `grad` (shaped like the model).
double example_loss_and_gradient(const PoseModel& model, const PoseExample& example, PoseModel& grad);

struct TrainConfig {
  double learning_rate = 1e-4;
  int steps = 1000;
  int batch_size = 8;
  std::uint64_t seed = 0;
  double upsample_threshold = 0.3;
  int upsample_factor = 3;
};

/// Dataset indices with difficult scenes repeated upsample_factor times.
std::vector<std::size_t> sampling_pool(std::span<const PoseExample> dataset, const TrainConfig& config);

struct TrainLog {
  std::vector<double> losses;  // mean per-scene loss of each step's batch
};

PoseModel train_pose(std::span<const PoseExample> dataset, const PoseHyper& hyper, const TrainConfig& config,
                     TrainLog* log = nullptr);

/// Index of the largest logit; ties go to the lowest bin.
int argmax_bin(const Eigen::Ref<const Eigen::RowVectorXd>& logits);

/// Degrees per object id: primaries first, then dependents in dependency
/// order, each conditioned on its target's predicted angle.
std::map<int, double> predict_pose(const PoseModel& model, const Layout& layout);

struct PoseMetrics {
  double primary_accuracy = 0.0;
  double dependent_accuracy = 0.0;
  double mean_iou = 0.0;
};

/// Accuracy by role over confident objects; mean oriented IoU of each box
/// rotated by the predicted versus the labelled angle.
PoseMetrics pose_metrics(const std::map<int, double>& predicted, const PoseExample& example);

/// Dependent accuracy when every target receives its ground-truth angle.
double teacher_forced_dependent_accuracy(const PoseModel& model, std::span<const PoseExample> dataset);

}  // namespace sceneforge
