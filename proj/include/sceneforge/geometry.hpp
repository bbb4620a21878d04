#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

namespace sceneforge {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

double dot(Vec2 a, Vec2 b);
double cross(Vec2 a, Vec2 b);
double norm(Vec2 a);

/// Rotates `p` counter-clockwise by `degrees` about the origin.
Vec2 rotate(Vec2 p, double degrees);

/// Axis-aligned box in world meters. Degenerate (zero-area) boxes are legal.
struct Aabb {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  Vec2 center() const { return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max)}; }
  bool valid() const;

  static Aabb from_center(Vec2 center, double width, double height);
  Aabb translated(Vec2 d) const { return {x_min + d.x, y_min + d.y, x_max + d.x, y_max + d.y}; }
  static Aabb bounding(std::span<const Vec2> points);

  friend bool operator==(const Aabb&, const Aabb&) = default;
};

Aabb unite(const Aabb& a, const Aabb& b);

/// Box rotated counter-clockwise by `theta` degrees about its center.
/// theta is kept in [0, 180): a footprint is symmetric under a half turn.
struct OrientedBox {
  Vec2 center;
  Vec2 half_extents;
  double theta = 0.0;

  /// The footprint obtained by rotating `box` by `theta` about its center.
  static OrientedBox from_aabb(const Aabb& box, double theta);

  /// Corners in counter-clockwise order.
  std::array<Vec2, 4> corners() const;
};

struct Wall {
  Vec2 p1;
  Vec2 p2;

  /// Direction of p2 - p1 reduced to [0, 180) degrees.
  double orientation() const;

  friend bool operator==(const Wall&, const Wall&) = default;
};

/// One of 36 five-degree classes covering [0, 180).
class OrientationBin {
 public:
  static constexpr int kCount = 36;
  static constexpr double kWidthDegrees = 5.0;

  explicit OrientationBin(int index);
  int index() const { return index_; }
  double theta() const { return kWidthDegrees * index_; }

  friend bool operator==(OrientationBin, OrientationBin) = default;

 private:
  int index_;
};

/// Reduces any finite angle to [0, 180).
double reduce_half_turn(double degrees);
/// Reduces any finite angle to [0, 360).
double reduce_full_turn(double degrees);
/// Smallest distance between two angles treated modulo 180.
double half_turn_distance(double a, double b);

double iou(const Aabb& a, const Aabb& b);

OrientationBin theta_to_bin(double theta);
double bin_to_theta(OrientationBin bin);

struct OrientationFit {
  double theta = 0.0;
  OrientedBox box;
};

/// Sweeps whole-degree rotations in [0, 180) and returns the one whose
/// axis-aligned bounds (of the points rotated by -theta) have minimal area.
/// Among equal areas the rotation that puts the longer side along the
/// rotated x axis wins, then the smallest angle. Throws GeometryError for
/// fewer than three points or a collinear set.
OrientationFit min_area_orientation(std::span<const Vec2> points);

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

struct WallHit {
  std::size_t index = 0;
  double distance = 0.0;
};

/// First wall (in list order) at minimal point-to-segment distance.
WallHit nearest_wall(Vec2 center, std::span<const Wall> walls);

using Polygon = std::vector<Vec2>;

double polygon_area(const Polygon& poly);
/// Intersection of two convex polygons given counter-clockwise.
Polygon clip_convex(const Polygon& subject, const Polygon& clip);
double oriented_iou(const OrientedBox& a, const OrientedBox& b);

}  // namespace sceneforge
