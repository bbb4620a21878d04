#include <algorithm>
#include <bit>
#include <cmath>
#include <cctype>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>

#include "pose_internal.hpp"
#include "sceneforge/error.hpp"
#include "sceneforge/synth.hpp"

namespace sceneforge {

using Eigen::MatrixXd;
using Eigen::RowVectorXd;

int category_index(const std::string& category) {
  for (int i = 0; i < kCategoryVocab - 1; ++i) {
    if (kSceneCategories[static_cast<std::size_t>(i)] == category) return i;
  }
  return kCategoryVocab - 1;
}

std::vector<int> call_tokens(const std::string& call) {
  std::vector<std::string> tokens;
  std::string cur;
  const auto flush = [&] {
    if (!cur.empty()) tokens.push_back(std::isdigit(static_cast<unsigned char>(cur[0])) || cur[0] == '.' ? "#" : cur);
    cur.clear();
  };
  for (char c : call) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') {
      cur.push_back(c);
    } else {
      flush();
      if (!std::isspace(static_cast<unsigned char>(c))) tokens.emplace_back(1, c);
    }
  }
  flush();
  std::vector<int> out;
  for (const std::string& t : tokens) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : t) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    out.push_back(static_cast<int>(h % kCallBuckets));
  }
  return out;
}

PoseModel PoseModel::init(const PoseHyper& hyper, std::uint64_t seed) {
  if (hyper.d < 1 || hyper.heads < 1 || hyper.d % hyper.heads != 0 || hyper.layers < 0 || hyper.ffn < 1) {
    throw Error("pose model: d must be a positive multiple of heads");
  }
  PoseModel m;
  m.hyper_ = hyper;
  m.seed_ = seed;
  std::mt19937_64 rng(seed);
  const int d = hyper.d;
  const auto add = [&](const std::string& name, int rows, int cols, double stddev) {
    MatrixXd t = MatrixXd::Zero(rows, cols);
    if (stddev > 0) {
      std::normal_distribution<double> n(0.0, stddev);
      for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) t(r, c) = n(rng);
      }
    }
    m.names_.push_back(name);
    m.tensors_.push_back(std::move(t));
  };
  const double inv_d = 1.0 / std::sqrt(static_cast<double>(d));
  add("category_embedding", kCategoryVocab, d, 0.5);
  add("box_w", 4, d, 0.5);
  add("box_b", 1, d, 0.0);
  add("wall_w", 5, d, 1.0 / std::sqrt(5.0));
  add("wall_b", 1, d, 0.0);
  // Large weights saturate the angle features into sharp arcs of the circle,
  // fine enough to tell neighbouring 5 degree bins apart.
  add("angle_w", 2, d, 100.0);
  add("angle_b", 1, d, 0.0);
  add("call_embedding", kCallBuckets, d, 0.5);
  for (int l = 0; l < hyper.layers; ++l) {
    for (const char* stage : {"primary", "dependent"}) {
      const std::string p = "layer" + std::to_string(l) + "." + stage + ".";
      add(p + "wq", d, d, inv_d);
      add(p + "wk", d, d, inv_d);
      add(p + "wv", d, d, inv_d);
      add(p + "wo", d, d, inv_d);
      add(p + "bo", 1, d, 0.0);
      add(p + "w1", d, hyper.ffn, inv_d);
      add(p + "b1", 1, hyper.ffn, 0.0);
      add(p + "w2", hyper.ffn, d, 1.0 / std::sqrt(static_cast<double>(hyper.ffn)));
      add(p + "b2", 1, d, 0.0);
    }
  }
  add("out_w", d, OrientationBin::kCount, inv_d);
  add("out_b", 1, OrientationBin::kCount, 0.0);
  add("dependent_out_w", d, OrientationBin::kCount, inv_d);
  add("dependent_out_b", 1, OrientationBin::kCount, 0.0);
  return m;
}

PoseModel PoseModel::zeros_like(const PoseModel& model) {
  PoseModel z = model;
  for (MatrixXd& t : z.tensors_) t.setZero();
  return z;
}

std::size_t PoseModel::parameter_count() const {
  std::size_t n = 0;
  for (const MatrixXd& t : tensors_) n += static_cast<std::size_t>(t.size());
  return n;
}

bool operator==(const PoseModel& a, const PoseModel& b) {
  if (!(a.hyper_ == b.hyper_) || a.seed_ != b.seed_ || a.names_ != b.names_) return false;
  for (std::size_t i = 0; i < a.tensors_.size(); ++i) {
    const MatrixXd& x = a.tensors_[i];
    const MatrixXd& y = b.tensors_[i];
    if (x.rows() != y.rows() || x.cols() != y.cols()) return false;
    if (std::memcmp(x.data(), y.data(), sizeof(double) * static_cast<std::size_t>(x.size())) != 0) return false;
  }
  return true;
}

namespace {

std::uint64_t byteswap64(std::uint64_t v) {
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) r = (r << 8) | ((v >> (8 * i)) & 0xff);
  return r;
}

}  // namespace

void PoseModel::save(const std::filesystem::path& path) const {
  Json tensors = Json::array();
  std::string blob;
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    const MatrixXd& t = tensors_[i];
    tensors.push_back({{"name", names_[i]}, {"rows", t.rows()}, {"cols", t.cols()}, {"offset", blob.size() / 8}});
    // Row-major little-endian float64.
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      for (Eigen::Index c = 0; c < t.cols(); ++c) {
        std::uint64_t bits = std::bit_cast<std::uint64_t>(t(r, c));
        if constexpr (std::endian::native == std::endian::big) bits = byteswap64(bits);
        char bytes[8];
        std::memcpy(bytes, &bits, 8);
        blob.append(bytes, 8);
      }
    }
  }
  const Json manifest{
      {"format", "sceneforge-posemodel"},
      {"version", 1},
      {"seed", seed_},
      {"hyper",
       {{"d", hyper_.d},
        {"heads", hyper_.heads},
        {"layers", hyper_.layers},
        {"ffn", hyper_.ffn},
        {"dependency_conditioning", hyper_.dependency_conditioning}}},
      {"tensors", tensors},
      {"weights", path.filename().string() + ".bin"},
  };
  write_file(path, manifest.dump(2) + "\n");
  write_file(path.string() + ".bin", blob);
}

PoseModel PoseModel::load(const std::filesystem::path& path) {
  const Json m = parse_json(read_file(path), path.string());
  try {
    if (m.at("format") != "sceneforge-posemodel" || m.at("version") != 1) {
      throw FormatError(path.string() + ": not a version 1 pose model");
    }
    PoseHyper h;
    const Json& hj = m.at("hyper");
    h.d = hj.at("d").get<int>();
    h.heads = hj.at("heads").get<int>();
    h.layers = hj.at("layers").get<int>();
    h.ffn = hj.at("ffn").get<int>();
    h.dependency_conditioning = hj.at("dependency_conditioning").get<bool>();
    PoseModel model = PoseModel::init(h, 0);
    model.seed_ = m.at("seed").get<std::uint64_t>();
    model.tensors_.clear();
    const std::string blob = read_file(path.parent_path() / m.at("weights").get<std::string>());
    const Json& ts = m.at("tensors");
    if (ts.size() != model.names_.size()) throw FormatError(path.string() + ": tensor count mismatch");
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const Json& t = ts[i];
      if (t.at("name") != model.names_[i]) throw FormatError(path.string() + ": unexpected tensor " + t.at("name").dump());
      const auto rows = t.at("rows").get<Eigen::Index>(), cols = t.at("cols").get<Eigen::Index>();
      const auto offset = t.at("offset").get<std::size_t>();
      if ((offset + static_cast<std::size_t>(rows * cols)) * 8 > blob.size()) {
        throw FormatError(path.string() + ": weight blob is truncated");
      }
      MatrixXd x(rows, cols);
      std::size_t at = offset * 8;
      for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
          std::uint64_t bits;
          std::memcpy(&bits, blob.data() + at, 8);
          if constexpr (std::endian::native == std::endian::big) bits = byteswap64(bits);
          x(r, c) = std::bit_cast<double>(bits);
          at += 8;
        }
      }
      model.tensors_.push_back(std::move(x));
    }
    const PoseModel shape = PoseModel::init(h, 0);
    for (std::size_t i = 0; i < shape.tensors_.size(); ++i) {
      if (shape.tensors_[i].rows() != model.tensors_[i].rows() || shape.tensors_[i].cols() != model.tensors_[i].cols()) {
        throw FormatError(path.string() + ": tensor " + model.names_[i] + " has the wrong shape");
      }
    }
    return model;
  } catch (const Json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

namespace pose_detail {

namespace {

constexpr std::size_t kCat = 0, kBoxW = 1, kBoxB = 2, kWallW = 3, kWallB = 4, kAngW = 5, kAngB = 6, kCall = 7;
constexpr std::size_t kLayerBase = 8, kPerStage = 9, kPerLayer = 2 * kPerStage;
enum : std::size_t { kWq, kWk, kWv, kWo, kBo, kW1, kB1, kW2, kB2 };

// stage 0 serves primary slots, stage 1 dependent slots.
std::size_t layer_tensor(int layer, int stage, std::size_t which) {
  return kLayerBase + static_cast<std::size_t>(layer) * kPerLayer + static_cast<std::size_t>(stage) * kPerStage + which;
}

std::size_t head_tensor(const PoseHyper& h, bool dependent) {
  return kLayerBase + static_cast<std::size_t>(h.layers) * kPerLayer + (dependent ? 2 : 0);
}

MatrixXd tanh_of(const MatrixXd& x) { return x.array().tanh().matrix(); }

}  // namespace

SceneInput scene_input(const Layout& layout, const std::vector<std::size_t>& primaries,
                       const std::vector<std::size_t>& dependents, const std::map<int, double>* thetas) {
  SceneInput in;
  const Aabb& rb = layout.room_bounds;
  const Vec2 rc = rb.center();
  const double s = std::max(0.5 * std::max(rb.width(), rb.height()), 1e-6);
  in.walls = MatrixXd::Zero(static_cast<Eigen::Index>(layout.walls.size()), 5);
  for (std::size_t w = 0; w < layout.walls.size(); ++w) {
    const Wall& wall = layout.walls[w];
    in.walls.row(static_cast<Eigen::Index>(w)) << (wall.p1.x - rc.x) / s, (wall.p1.y - rc.y) / s,
        (wall.p2.x - rc.x) / s, (wall.p2.y - rc.y) / s, wall.orientation() / 180.0;
  }
  const auto slot = [&](std::size_t index, bool dependent) {
    const PlacedObject& o = layout.objects[index];
    SlotInput si;
    si.cat = category_index(o.category);
    const Vec2 c = o.box.center();
    si.box << (c.x - rc.x) / s, (c.y - rc.y) / s, o.box.width() / s, o.box.height() / s;
    si.wall = layout.walls.empty() ? -1 : static_cast<int>(nearest_wall(c, layout.walls).index);
    si.dependent = dependent;
    if (dependent) {
      const auto it = thetas->find(*o.dependency_target);
      if (it == thetas->end()) {
        throw Error("object " + std::to_string(o.id) + ": no angle for dependency target " +
                    std::to_string(*o.dependency_target));
      }
      const double t = it->second * std::numbers::pi / 180.0;
      si.angle << std::sin(2.0 * t), std::cos(2.0 * t);
      si.tokens = call_tokens(o.instantiating_call);
    }
    return si;
  };
  for (std::size_t i : primaries) in.slots.push_back(slot(i, false));
  for (std::size_t i : dependents) in.slots.push_back(slot(i, true));
  in.n_primary = primaries.size();
  return in;
}

MatrixXd forward(const PoseModel& model, const SceneInput& in, Cache* cache) {
  const PoseHyper& h = model.hyper();
  const int d = h.d;
  const auto n = static_cast<Eigen::Index>(in.slots.size());
  Cache local;
  Cache& c = cache ? *cache : local;
  c = Cache{};

  c.wall_enc = in.walls.rows() > 0
                   ? MatrixXd(tanh_of((in.walls * model.tensor(kWallW)).rowwise() +
                                      model.tensor(kWallB).row(0)))
                   : MatrixXd::Zero(0, d);
  RowVectorXd wall_mean = RowVectorXd::Zero(d);
  if (c.wall_enc.rows() > 0) wall_mean = c.wall_enc.colwise().mean();

  MatrixXd feats(n, 4), angles(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    feats.row(i) = in.slots[static_cast<std::size_t>(i)].box;
    angles.row(i) = in.slots[static_cast<std::size_t>(i)].angle;
  }
  c.box_enc = tanh_of((feats * model.tensor(kBoxW)).rowwise() + model.tensor(kBoxB).row(0));
  c.angle_enc = tanh_of((angles * model.tensor(kAngW)).rowwise() + model.tensor(kAngB).row(0));

  MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const SlotInput& s = in.slots[static_cast<std::size_t>(i)];
    RowVectorXd row = model.tensor(kCat).row(s.cat) + c.box_enc.row(i) + wall_mean;
    if (s.wall >= 0) row += c.wall_enc.row(s.wall);
    if (s.dependent && h.dependency_conditioning) {
      row += c.angle_enc.row(i);
      if (!s.tokens.empty()) {
        RowVectorXd pooled = RowVectorXd::Zero(d);
        for (int t : s.tokens) pooled += model.tensor(kCall).row(t);
        row += pooled / static_cast<double>(s.tokens.size());
      }
    }
    x.row(i) = row;
  }

  const int dh = d / h.heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const auto np = static_cast<Eigen::Index>(in.n_primary);
  for (int l = 0; l < h.layers; ++l) {
    LayerCache lc;
    MatrixXd next(n, d);
    for (int stage = 0; stage < 2; ++stage) {
      StageCache& sc = lc.stage[stage];
      sc.row0 = stage == 0 ? 0 : np;
      sc.rows = stage == 0 ? np : n - np;
      // Primary slots see only primaries; dependents see every slot.
      sc.context = stage == 0 ? np : n;
      if (sc.rows == 0) continue;
      const auto w = [&](std::size_t which) -> const MatrixXd& { return model.tensor(layer_tensor(l, stage, which)); };
      sc.x = x.middleRows(sc.row0, sc.rows);
      sc.q = sc.x * w(kWq);
      sc.k = x.topRows(sc.context) * w(kWk);
      sc.v = x.topRows(sc.context) * w(kWv);
      sc.heads = MatrixXd(sc.rows, d);
      for (int hd = 0; hd < h.heads; ++hd) {
        MatrixXd a = sc.q.middleCols(hd * dh, dh) * sc.k.middleCols(hd * dh, dh).transpose() * scale;
        a = (a.colwise() - a.rowwise().maxCoeff()).array().exp().matrix();
        a = a.array().colwise() / a.rowwise().sum().array();
        sc.heads.middleCols(hd * dh, dh) = a * sc.v.middleCols(hd * dh, dh);
        sc.attn.push_back(std::move(a));
      }
      sc.x1 = sc.x + ((sc.heads * w(kWo)).rowwise() + w(kBo).row(0));
      sc.t = tanh_of((sc.x1 * w(kW1)).rowwise() + w(kB1).row(0));
      next.middleRows(sc.row0, sc.rows) = sc.x1 + ((sc.t * w(kW2)).rowwise() + w(kB2).row(0));
    }
    lc.x = x;
    x = next;
    c.layers.push_back(std::move(lc));
  }
  c.final = x;
  // Each stage reads the encoding through its own head.
  MatrixXd logits(n, OrientationBin::kCount);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t w = head_tensor(h, in.slots[static_cast<std::size_t>(i)].dependent);
    logits.row(i) = x.row(i) * model.tensor(w) + model.tensor(w + 1).row(0);
  }
  return logits;
}

void backward(const PoseModel& model, const SceneInput& in, const Cache& c, const MatrixXd& dlogits, PoseModel& g) {
  const PoseHyper& h = model.hyper();
  const int d = h.d;
  const int dh = d / h.heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const auto n = static_cast<Eigen::Index>(in.slots.size());
  MatrixXd dx(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t w = head_tensor(h, in.slots[static_cast<std::size_t>(i)].dependent);
    g.tensor(w) += c.final.row(i).transpose() * dlogits.row(i);
    g.tensor(w + 1) += dlogits.row(i);
    dx.row(i) = dlogits.row(i) * model.tensor(w).transpose();
  }

  for (int l = h.layers - 1; l >= 0; --l) {
    const LayerCache& lc = c.layers[static_cast<std::size_t>(l)];
    MatrixXd dprev = MatrixXd::Zero(n, d);
    for (int stage = 0; stage < 2; ++stage) {
      const StageCache& sc = lc.stage[stage];
      if (sc.rows == 0) continue;
      const auto w = [&](std::size_t which) -> const MatrixXd& { return model.tensor(layer_tensor(l, stage, which)); };
      const auto gw = [&](std::size_t which) -> MatrixXd& { return g.tensor(layer_tensor(l, stage, which)); };
      const MatrixXd dout = dx.middleRows(sc.row0, sc.rows);
      // Feedforward.
      gw(kW2) += sc.t.transpose() * dout;
      gw(kB2) += dout.colwise().sum();
      const MatrixXd dz = ((dout * w(kW2).transpose()).array() * (1.0 - sc.t.array().square())).matrix();
      gw(kW1) += sc.x1.transpose() * dz;
      gw(kB1) += dz.colwise().sum();
      const MatrixXd dx1 = dout + dz * w(kW1).transpose();
      // Attention.
      gw(kWo) += sc.heads.transpose() * dx1;
      gw(kBo) += dx1.colwise().sum();
      const MatrixXd dheads = dx1 * w(kWo).transpose();
      MatrixXd dq(sc.rows, d), dk(sc.context, d), dv(sc.context, d);
      for (int hd = 0; hd < h.heads; ++hd) {
        const MatrixXd& a = sc.attn[static_cast<std::size_t>(hd)];
        const MatrixXd dhh = dheads.middleCols(hd * dh, dh);
        const MatrixXd da = dhh * sc.v.middleCols(hd * dh, dh).transpose();
        dv.middleCols(hd * dh, dh) = a.transpose() * dhh;
        const Eigen::VectorXd rows = (da.array() * a.array()).rowwise().sum();
        const MatrixXd ds = (a.array() * (da.colwise() - rows).array()).matrix() * scale;
        dq.middleCols(hd * dh, dh) = ds * sc.k.middleCols(hd * dh, dh);
        dk.middleCols(hd * dh, dh) = ds.transpose() * sc.q.middleCols(hd * dh, dh);
      }
      const MatrixXd context = lc.x.topRows(sc.context);
      gw(kWq) += sc.x.transpose() * dq;
      gw(kWk) += context.transpose() * dk;
      gw(kWv) += context.transpose() * dv;
      dprev.middleRows(sc.row0, sc.rows) += dx1 + dq * w(kWq).transpose();
      dprev.topRows(sc.context) += dk * w(kWk).transpose() + dv * w(kWv).transpose();
    }
    dx = dprev;
  }

  // Encoders.
  MatrixXd dwall = MatrixXd::Zero(c.wall_enc.rows(), d);
  MatrixXd dbox(n, d), dangle = MatrixXd::Zero(n, d);
  const RowVectorXd dsum = dx.colwise().sum();
  if (dwall.rows() > 0) dwall.rowwise() += dsum / static_cast<double>(dwall.rows());
  for (Eigen::Index i = 0; i < n; ++i) {
    const SlotInput& s = in.slots[static_cast<std::size_t>(i)];
    g.tensor(kCat).row(s.cat) += dx.row(i);
    dbox.row(i) = dx.row(i);
    if (s.wall >= 0) dwall.row(s.wall) += dx.row(i);
    if (s.dependent && h.dependency_conditioning) {
      dangle.row(i) = dx.row(i);
      for (int t : s.tokens) g.tensor(kCall).row(t) += dx.row(i) / static_cast<double>(s.tokens.size());
    }
  }
  MatrixXd feats(n, 4), angles(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    feats.row(i) = in.slots[static_cast<std::size_t>(i)].box;
    angles.row(i) = in.slots[static_cast<std::size_t>(i)].angle;
  }
  const MatrixXd dbox_pre = (dbox.array() * (1.0 - c.box_enc.array().square())).matrix();
  g.tensor(kBoxW) += feats.transpose() * dbox_pre;
  g.tensor(kBoxB) += dbox_pre.colwise().sum();
  const MatrixXd dang_pre = (dangle.array() * (1.0 - c.angle_enc.array().square())).matrix();
  g.tensor(kAngW) += angles.transpose() * dang_pre;
  g.tensor(kAngB) += dang_pre.colwise().sum();
  if (dwall.rows() > 0) {
    const MatrixXd dwall_pre = (dwall.array() * (1.0 - c.wall_enc.array().square())).matrix();
    g.tensor(kWallW) += in.walls.transpose() * dwall_pre;
    g.tensor(kWallB) += dwall_pre.colwise().sum();
  }
}

}  // namespace pose_detail

}  // namespace sceneforge
