#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sceneforge/dsl.hpp"
#include "sceneforge/geometry.hpp"
#include "sceneforge/library.hpp"

namespace sceneforge {

enum class Role { kPrimary, kDependent };

struct PlacedObject {
  int id = 0;
  std::string category;
  Aabb box;
  Role role = Role::kPrimary;
  std::optional<int> dependency_target;
  /// Canonical text of the top-level call that produced the object.
  std::string instantiating_call;

  friend bool operator==(const PlacedObject&, const PlacedObject&) = default;
};

struct Room {
  Aabb bounds;
  std::vector<Wall> walls;

  /// Four walls tracing `bounds` counter-clockwise from the lower-left corner.
  static Room rectangular(const Aabb& bounds);
};

struct Layout {
  std::vector<PlacedObject> objects;
  std::vector<Wall> walls;
  Aabb room_bounds;

  const PlacedObject* find(int id) const;
  friend bool operator==(const Layout&, const Layout&) = default;
};

/// Direction codes shared by parallel and align: 1 = +y (up), 2 = -y (down),
/// 3 = -x (left), 4 = +x (right).
Vec2 direction_vector(int direction);

/// Box-level semantics of the placement functions. Distances are measured
/// center to center.
namespace stdlib {

struct Size {
  double width = 0.0;
  double height = 0.0;
};

Aabb furniture(double x_min, double y_min, double x_max, double y_max);
Aabb parallel(const Aabb& anchor, double distance_apart, int direction,
              std::optional<Size> size = std::nullopt);
std::vector<Aabb> align(const Aabb& ref, int count, double distance, int direction);
std::vector<Aabb> grid(const Aabb& ref, int rows, int cols, double h_distance, double v_distance);
std::vector<Aabb> grid_with_offset(const Aabb& ref, int rows, int cols, double h_distance,
                                   double v_distance, std::span<const double> row_offsets,
                                   std::span<const double> col_offsets);
std::vector<Aabb> symmetrical(Vec2 center, double distance_x, double distance_y, Size size);
std::vector<Aabb> cluster_placement(const Aabb& anchor, std::span<const Vec2> offsets,
                                    std::optional<Size> size = std::nullopt);

}  // namespace stdlib

/// Runs `program` against `library` inside `room`. Deterministic; throws
/// ExecError for unresolved names, arity or type errors, non-finite
/// coordinates and fractional loop bounds.
///
/// A variable whose every use is as the reference argument of a
/// reference-consuming call (align, grid, grid_with_offset, or a library
/// function that forwards its first parameter to one) is a template: its
/// object is not emitted, and the consuming call's outputs inherit its
/// provenance.
Layout execute(const dsl::Program& program, const Library& library, const Room& room);

/// Statement index (into program.statements) that emitted each object of
/// the layout returned by execute, in object order.
struct TracedLayout {
  Layout layout;
  std::vector<std::size_t> statement_of;
  /// Boxes of top-level names bound to a single object, emitted or not.
  std::map<std::string, Aabb> object_vars;
};
TracedLayout execute_traced(const dsl::Program& program, const Library& library, const Room& room);

/// Boxes returned by calling `def` with the given numeric and object
/// arguments; objects are passed as boxes. Used to probe candidate
/// abstractions without building a program around them.
struct Argument {
  std::variant<double, Aabb> value;
};
std::vector<Aabb> evaluate_function(const dsl::FuncDef& def, std::span<const Argument> args,
                                    const Library& library);

/// True when the named callee consumes its first argument (see execute).
bool consumes_reference(const std::string& callee, const Library& library,
                        std::span<const dsl::FuncDef> local_defs = {});

}  // namespace sceneforge
