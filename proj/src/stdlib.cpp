#include <cmath>

#include "sceneforge/error.hpp"
#include "sceneforge/interp.hpp"

namespace sceneforge {

Vec2 direction_vector(int direction) {
  switch (direction) {
    case 1: return {0.0, 1.0};
    case 2: return {0.0, -1.0};
    case 3: return {-1.0, 0.0};
    case 4: return {1.0, 0.0};
    default:
      throw ExecError("invalid direction " + std::to_string(direction) +
                      " (expected 1 up, 2 down, 3 left, 4 right)");
  }
}

namespace stdlib {

namespace {

void check_size(const Size& s) {
  if (!(s.width > 0.0) || !(s.height > 0.0)) throw ExecError("object size must be positive");
}

}  // namespace

Aabb furniture(double x_min, double y_min, double x_max, double y_max) {
  Aabb box{x_min, y_min, x_max, y_max};
  if (!box.valid()) throw ExecError("furniture bounds must be finite with min <= max");
  return box;
}

Aabb parallel(const Aabb& anchor, double distance_apart, int direction, std::optional<Size> size) {
  const Vec2 dir = direction_vector(direction);
  if (!(distance_apart >= 0.0)) throw ExecError("parallel distance_apart must be >= 0");
  if (!size) return anchor.translated(distance_apart * dir);
  check_size(*size);
  return Aabb::from_center(anchor.center() + distance_apart * dir, size->width, size->height);
}

std::vector<Aabb> align(const Aabb& ref, int count, double distance, int direction) {
  if (count < 1) throw ExecError("align count must be >= 1");
  const Vec2 dir = direction_vector(direction);
  std::vector<Aabb> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out.push_back(ref.translated((i * distance) * dir));
  }
  return out;
}

std::vector<Aabb> grid(const Aabb& ref, int rows, int cols, double h_distance, double v_distance) {
  return grid_with_offset(ref, rows, cols, h_distance, v_distance, {}, {});
}

std::vector<Aabb> grid_with_offset(const Aabb& ref, int rows, int cols, double h_distance,
                                   double v_distance, std::span<const double> row_offsets,
                                   std::span<const double> col_offsets) {
  if (rows < 1 || cols < 1) throw ExecError("grid rows and cols must be >= 1");
  if (!row_offsets.empty() && row_offsets.size() != static_cast<std::size_t>(rows)) {
    throw ExecError("row_offsets length must equal rows");
  }
  if (!col_offsets.empty() && col_offsets.size() != static_cast<std::size_t>(cols)) {
    throw ExecError("col_offsets length must equal cols");
  }
  std::vector<Aabb> out;
  out.reserve(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  for (int r = 0; r < rows; ++r) {
    for (int k = 0; k < cols; ++k) {
      double x = (k - 0.5 * (cols - 1)) * h_distance;
      double y = (0.5 * (rows - 1) - r) * v_distance;
      if (!row_offsets.empty()) x += row_offsets[static_cast<std::size_t>(r)];
      if (!col_offsets.empty()) y += col_offsets[static_cast<std::size_t>(k)];
      out.push_back(ref.translated({x, y}));
    }
  }
  return out;
}

std::vector<Aabb> symmetrical(Vec2 center, double distance_x, double distance_y, Size size) {
  check_size(size);
  std::vector<Aabb> out;
  for (double sx : {1.0, -1.0}) {
    for (double sy : {1.0, -1.0}) {
      out.push_back(Aabb::from_center({center.x + sx * distance_x, center.y + sy * distance_y},
                                      size.width, size.height));
    }
  }
  return out;
}

std::vector<Aabb> cluster_placement(const Aabb& anchor, std::span<const Vec2> offsets,
                                    std::optional<Size> size) {
  if (offsets.empty()) throw ExecError("cluster_placement needs at least one offset");
  if (size) check_size(*size);
  std::vector<Aabb> out;
  out.reserve(offsets.size());
  for (const Vec2& o : offsets) {
    out.push_back(size ? Aabb::from_center(anchor.center() + o, size->width, size->height)
                       : anchor.translated(o));
  }
  return out;
}

}  // namespace stdlib
}  // namespace sceneforge
