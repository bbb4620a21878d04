#include "sceneforge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sceneforge/error.hpp"

namespace sceneforge {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace

double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 a) { return std::hypot(a.x, a.y); }

Vec2 rotate(Vec2 p, double degrees) {
  const double r = degrees * kDegToRad;
  const double c = std::cos(r);
  const double s = std::sin(r);
  return {c * p.x - s * p.y, s * p.x + c * p.y};
}

bool Aabb::valid() const {
  return std::isfinite(x_min) && std::isfinite(y_min) && std::isfinite(x_max) &&
         std::isfinite(y_max) && x_min <= x_max && y_min <= y_max;
}

Aabb Aabb::from_center(Vec2 center, double width, double height) {
  return {center.x - 0.5 * width, center.y - 0.5 * height, center.x + 0.5 * width,
          center.y + 0.5 * height};
}

Aabb Aabb::bounding(std::span<const Vec2> points) {
  if (points.empty()) throw GeometryError("bounding box of an empty point set");
  Aabb box{points[0].x, points[0].y, points[0].x, points[0].y};
  for (const Vec2& p : points.subspan(1)) {
    box.x_min = std::min(box.x_min, p.x);
    box.y_min = std::min(box.y_min, p.y);
    box.x_max = std::max(box.x_max, p.x);
    box.y_max = std::max(box.y_max, p.y);
  }
  return box;
}

Aabb unite(const Aabb& a, const Aabb& b) {
  return {std::min(a.x_min, b.x_min), std::min(a.y_min, b.y_min), std::max(a.x_max, b.x_max),
          std::max(a.y_max, b.y_max)};
}

OrientedBox OrientedBox::from_aabb(const Aabb& box, double theta) {
  return {box.center(), {0.5 * box.width(), 0.5 * box.height()}, reduce_half_turn(theta)};
}

std::array<Vec2, 4> OrientedBox::corners() const {
  const Vec2 h = half_extents;
  const std::array<Vec2, 4> local{Vec2{-h.x, -h.y}, Vec2{h.x, -h.y}, Vec2{h.x, h.y},
                                  Vec2{-h.x, h.y}};
  std::array<Vec2, 4> out{};
  for (std::size_t i = 0; i < 4; ++i) out[i] = center + rotate(local[i], theta);
  return out;
}

double Wall::orientation() const {
  const Vec2 d = p2 - p1;
  return reduce_half_turn(std::atan2(d.y, d.x) / kDegToRad);
}

OrientationBin::OrientationBin(int index) : index_(index) {
  if (index < 0 || index >= kCount) throw GeometryError("orientation bin out of range");
}

double reduce_half_turn(double degrees) {
  double r = std::fmod(degrees, 180.0);
  if (r < 0.0) r += 180.0;
  // fmod of a tiny negative value can round back up to exactly 180.
  if (r >= 180.0) r = 0.0;
  return r;
}

double reduce_full_turn(double degrees) {
  double r = std::fmod(degrees, 360.0);
  if (r < 0.0) r += 360.0;
  if (r >= 360.0) r = 0.0;
  return r;
}

double half_turn_distance(double a, double b) {
  const double d = reduce_half_turn(a - b);
  return std::min(d, 180.0 - d);
}

double iou(const Aabb& a, const Aabb& b) {
  const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return a == b ? 1.0 : 0.0;
  return inter / uni;
}

OrientationBin theta_to_bin(double theta) {
  const int k = static_cast<int>(std::floor(reduce_half_turn(theta) / OrientationBin::kWidthDegrees));
  return OrientationBin(std::clamp(k, 0, OrientationBin::kCount - 1));
}

double bin_to_theta(OrientationBin bin) { return bin.theta(); }

OrientationFit min_area_orientation(std::span<const Vec2> points) {
  if (points.size() < 3) throw GeometryError("orientation fit needs at least 3 points");

  // Collinearity: every point within a relative epsilon of the line through
  // the first point and the point farthest from it.
  const Vec2 origin = points[0];
  Vec2 far = origin;
  double far_dist = 0.0;
  for (const Vec2& p : points) {
    const double d = norm(p - origin);
    if (d > far_dist) {
      far_dist = d;
      far = p;
    }
  }
  if (far_dist == 0.0) throw GeometryError("orientation fit on coincident points");
  double off_line = 0.0;
  for (const Vec2& p : points) {
    off_line = std::max(off_line, std::abs(cross(far - origin, p - origin)) / far_dist);
  }
  if (off_line <= 1e-12 * far_dist) throw GeometryError("orientation fit on collinear points");

  struct Sample {
    Aabb box;
    double area;
  };
  std::array<Sample, 180> samples{};
  std::vector<Vec2> rotated(points.size());
  double best_area = std::numeric_limits<double>::infinity();
  for (int deg = 0; deg < 180; ++deg) {
    for (std::size_t i = 0; i < points.size(); ++i) rotated[i] = rotate(points[i], -deg);
    const Aabb box = Aabb::bounding(rotated);
    samples[deg] = {box, box.area()};
    best_area = std::min(best_area, box.area());
  }

  const double area_tol = best_area * 1e-9 + 1e-15;
  int chosen = -1;
  bool chosen_long_x = false;
  for (int deg = 0; deg < 180; ++deg) {
    const Sample& s = samples[deg];
    if (s.area > best_area + area_tol) continue;
    const double w = s.box.width();
    const double h = s.box.height();
    const bool long_x = w >= h - 1e-9 * std::max(w, h);
    if (chosen < 0 || (long_x && !chosen_long_x)) {
      chosen = deg;
      chosen_long_x = long_x;
    }
  }

  const Aabb& frame_box = samples[chosen].box;
  OrientationFit fit;
  fit.theta = static_cast<double>(chosen);
  fit.box.center = rotate(frame_box.center(), fit.theta);
  fit.box.half_extents = {0.5 * frame_box.width(), 0.5 * frame_box.height()};
  fit.box.theta = fit.theta;
  return fit;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return norm(p - a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

WallHit nearest_wall(Vec2 center, std::span<const Wall> walls) {
  if (walls.empty()) throw GeometryError("nearest wall requested with no walls");
  WallHit hit{0, point_segment_distance(center, walls[0].p1, walls[0].p2)};
  for (std::size_t i = 1; i < walls.size(); ++i) {
    const double d = point_segment_distance(center, walls[i].p1, walls[i].p2);
    if (d < hit.distance) hit = {i, d};
  }
  return hit;
}

double polygon_area(const Polygon& poly) {
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    twice += cross(poly[i], poly[(i + 1) % poly.size()]);
  }
  return 0.5 * std::abs(twice);
}

Polygon clip_convex(const Polygon& subject, const Polygon& clip) {
  // Sutherland-Hodgman against each edge of the (counter-clockwise) clip polygon.
  Polygon output = subject;
  for (std::size_t e = 0; e < clip.size() && !output.empty(); ++e) {
    const Vec2 a = clip[e];
    const Vec2 b = clip[(e + 1) % clip.size()];
    const auto side = [&](Vec2 p) { return cross(b - a, p - a); };
    Polygon input;
    input.swap(output);
    for (std::size_t i = 0; i < input.size(); ++i) {
      const Vec2 cur = input[i];
      const Vec2 prev = input[(i + input.size() - 1) % input.size()];
      const double sc = side(cur);
      const double sp = side(prev);
      if (sc >= 0.0) {
        if (sp < 0.0) output.push_back(prev + (sp / (sp - sc)) * (cur - prev));
        output.push_back(cur);
      } else if (sp >= 0.0) {
        output.push_back(prev + (sp / (sp - sc)) * (cur - prev));
      }
    }
  }
  return output;
}

double oriented_iou(const OrientedBox& a, const OrientedBox& b) {
  const auto ca = a.corners();
  const auto cb = b.corners();
  const Polygon pa(ca.begin(), ca.end());
  const Polygon pb(cb.begin(), cb.end());
  const double area_a = polygon_area(pa);
  const double area_b = polygon_area(pb);
  const double inter = polygon_area(clip_convex(pa, pb));
  const double uni = area_a + area_b - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

}  // namespace sceneforge
