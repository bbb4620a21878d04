#pragma once

#include <map>
#include <vector>

#include "sceneforge/pose.hpp"

namespace sceneforge::pose_detail {

struct SlotInput {
  int cat = 0;
  Eigen::RowVector4d box = Eigen::RowVector4d::Zero();
  int wall = -1;
  bool dependent = false;
  Eigen::RowVector2d angle = Eigen::RowVector2d::Zero();
  std::vector<int> tokens;
};

// Primary slots come first.
struct SceneInput {
  std::vector<SlotInput> slots;
  std::size_t n_primary = 0;
  Eigen::MatrixXd walls;  // one row of 5 features per wall
};

// One stage of a layer: query rows [row0, row0 + rows) attend to rows [0, context).
struct StageCache {
  Eigen::Index row0 = 0, rows = 0, context = 0;
  Eigen::MatrixXd x, q, k, v, heads, x1, t;
  std::vector<Eigen::MatrixXd> attn;
};

struct LayerCache {
  Eigen::MatrixXd x;
  StageCache stage[2];
};

struct Cache {
  Eigen::MatrixXd wall_enc, box_enc, angle_enc, final;
  std::vector<LayerCache> layers;
};

/// `thetas` supplies the target angle of each dependent.
SceneInput scene_input(const Layout& layout, const std::vector<std::size_t>& primaries,
                       const std::vector<std::size_t>& dependents, const std::map<int, double>* thetas);

Eigen::MatrixXd forward(const PoseModel& model, const SceneInput& in, Cache* cache);
void backward(const PoseModel& model, const SceneInput& in, const Cache& cache, const Eigen::MatrixXd& dlogits,
              PoseModel& grad);

}  // namespace sceneforge::pose_detail
