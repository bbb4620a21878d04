#include "sceneforge/assemble.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "sceneforge/error.hpp"

namespace sceneforge {

namespace {

constexpr double kTie = 1e-12;

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  return j.at(key);
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) throw FormatError(std::string(what) + " must be a number");
  const double d = j.get<double>();
  if (!std::isfinite(d)) throw FormatError(std::string(what) + " must be finite");
  return d;
}

std::string text(const Json& j, const char* what) {
  if (!j.is_string()) throw FormatError(std::string(what) + " must be a string");
  return j.get<std::string>();
}

}  // namespace

void AssetCatalog::validate() const {
  std::set<std::string> ids;
  for (const auto& e : entries) {
    if (e.asset_id.empty()) throw FormatError("asset id must not be empty");
    if (!ids.insert(e.asset_id).second) throw FormatError("duplicate asset id '" + e.asset_id + "'");
    if (!(e.width > 0) || !(e.depth > 0)) throw FormatError("asset '" + e.asset_id + "' needs positive dims");
    if (e.category.empty() ||
        std::any_of(e.category.begin(), e.category.end(), [](unsigned char c) { return std::isupper(c); }))
      throw FormatError("asset '" + e.asset_id + "' category must be lowercase");
    if (!(e.front >= 0 && e.front < 360)) throw FormatError("asset '" + e.asset_id + "' front must lie in [0, 360)");
  }
}

std::vector<std::string> AssetCatalog::categories() const {
  std::set<std::string> s;
  for (const auto& e : entries) s.insert(e.category);
  return {s.begin(), s.end()};
}

Json to_json(const AssetCatalog& catalog) {
  Json entries = Json::array();
  for (const auto& e : catalog.entries)
    entries.push_back(
        {{"asset_id", e.asset_id}, {"category", e.category}, {"dims", {e.width, e.depth}}, {"front", e.front}});
  return {{"entries", entries}};
}

AssetCatalog catalog_from_json(const Json& j) {
  const Json& entries = field(j, "entries");
  if (!entries.is_array()) throw FormatError("entries must be an array");
  AssetCatalog c;
  for (const Json& e : entries) {
    const Json& dims = field(e, "dims");
    if (!dims.is_array() || dims.size() != 2) throw FormatError("dims must be [w, d]");
    c.entries.push_back({text(field(e, "asset_id"), "asset_id"), text(field(e, "category"), "category"),
                         number(dims[0], "dims"), number(dims[1], "dims"), number(field(e, "front"), "front")});
  }
  c.validate();
  return c;
}

Vec2 heading_vector(double degrees) { return rotate({0.0, -1.0}, degrees); }

Retrieval retrieve(const OrientedBox& obb, const std::string& category, const AssetCatalog& catalog) {
  const double w = 2 * obb.half_extents.x, d = 2 * obb.half_extents.y;
  Retrieval best;
  for (const auto& e : catalog.entries) {
    if (e.category != category) continue;
    const double straight = std::hypot(w - e.width, d - e.depth);
    const double swapped = std::hypot(w - e.depth, d - e.width);
    const Retrieval r{&e, swapped < straight, std::min(straight, swapped)};
    if (!best.entry || r.distance < best.distance ||
        (r.distance == best.distance && r.entry->asset_id < best.entry->asset_id))
      best = r;
  }
  if (!best.entry) {
    std::string known;
    for (const auto& c : catalog.categories()) known += (known.empty() ? "" : ", ") + c;
    throw CategoryMissing("no asset of category '" + category + "' (available: " + known + ")");
  }
  return best;
}

Aabb region_boundary(const PlacedObject& object, const Layout& layout) {
  if (object.role == Role::kPrimary || !object.dependency_target) return layout.room_bounds;
  const PlacedObject* target = layout.find(*object.dependency_target);
  if (!target)
    throw FormatError("object " + std::to_string(object.id) + " depends on missing id " +
                      std::to_string(*object.dependency_target));
  Aabb region = unite(target->box, object.box);
  for (const auto& o : layout.objects)
    if (o.dependency_target == object.dependency_target) region = unite(region, o.box);
  return region;
}

Vec2 away_from_boundary(Vec2 p, const Aabb& region) {
  const Vec2 clamped{std::clamp(p.x, region.x_min, region.x_max), std::clamp(p.y, region.y_min, region.y_max)};
  if (!(clamped == p)) {
    const Vec2 v = p - clamped;
    return (1.0 / norm(v)) * v;
  }
  const std::array<std::pair<double, Vec2>, 4> edges{{{p.x - region.x_min, {1, 0}},
                                                      {region.x_max - p.x, {-1, 0}},
                                                      {p.y - region.y_min, {0, 1}},
                                                      {region.y_max - p.y, {0, -1}}}};
  double nearest = edges[0].first;
  for (const auto& [dist, dir] : edges) nearest = std::min(nearest, dist);
  const double scale = std::max({1.0, std::abs(region.width()), std::abs(region.height())});
  Vec2 sum;
  for (const auto& [dist, dir] : edges)
    if (dist - nearest <= kTie * scale) sum = sum + dir;
  const double n = norm(sum);
  return n <= kTie ? Vec2{} : (1.0 / n) * sum;
}

double resolve_facing(const OrientedBox& obb, const Aabb& region, double front) {
  const Vec2 away = away_from_boundary(obb.center, region);
  const double facing = dot(heading_vector(front + obb.theta), away);
  const double r = facing < -kTie ? obb.theta + 180.0 : obb.theta;
  return reduce_full_turn(front + r);
}

std::array<Vec2, 4> placed_footprint(const Placement& placement, const AssetEntry& entry) {
  const double w = placement.swapped ? entry.depth : entry.width;
  const double d = placement.swapped ? entry.width : entry.depth;
  const double hx = 0.5 * w * placement.scale.x, hy = 0.5 * d * placement.scale.y;
  std::array<Vec2, 4> out{Vec2{-hx, -hy}, Vec2{hx, -hy}, Vec2{hx, hy}, Vec2{-hx, hy}};
  for (auto& c : out) c = placement.translation + rotate(c, placement.rotation);
  return out;
}

AssembledScene assemble(const Layout& layout, const std::map<int, double>& thetas, const AssetCatalog& catalog) {
  AssembledScene scene;
  for (const auto& obj : layout.objects) {
    const auto it = thetas.find(obj.id);
    if (it == thetas.end()) throw FormatError("no orientation for object " + std::to_string(obj.id));
    const OrientedBox obb = OrientedBox::from_aabb(obj.box, reduce_half_turn(it->second));
    const Retrieval r = retrieve(obb, obj.category, catalog);
    const double heading = resolve_facing(obb, region_boundary(obj, layout), r.entry->front);
    const double w = r.swapped ? r.entry->depth : r.entry->width;
    const double d = r.swapped ? r.entry->width : r.entry->depth;
    scene.placements.push_back({obj.id, r.entry->asset_id, obb.center, reduce_full_turn(heading - r.entry->front),
                                {2 * obb.half_extents.x / w, 2 * obb.half_extents.y / d}, r.swapped});
  }
  return scene;
}

Json to_json(const AssembledScene& scene) {
  Json out = Json::array();
  for (const auto& p : scene.placements)
    out.push_back({{"object_id", p.object_id},
                   {"asset_id", p.asset_id},
                   {"translation", to_json(p.translation)},
                   {"rotation", p.rotation},
                   {"scale", to_json(p.scale)},
                   {"swapped", p.swapped}});
  return {{"placements", out}};
}

AssembledScene assembled_scene_from_json(const Json& j) {
  const Json& list = field(j, "placements");
  if (!list.is_array()) throw FormatError("placements must be an array");
  AssembledScene scene;
  for (const Json& p : list) {
    const Json& id = field(p, "object_id");
    if (!id.is_number_integer()) throw FormatError("object_id must be an integer");
    const Json& swapped = field(p, "swapped");
    if (!swapped.is_boolean()) throw FormatError("swapped must be a boolean");
    Placement pl{id.get<int>(),
                 text(field(p, "asset_id"), "asset_id"),
                 vec2_from_json(field(p, "translation")),
                 number(field(p, "rotation"), "rotation"),
                 vec2_from_json(field(p, "scale")),
                 swapped.get<bool>()};
    if (!(pl.scale.x > 0) || !(pl.scale.y > 0)) throw FormatError("scale must be positive");
    scene.placements.push_back(std::move(pl));
  }
  return scene;
}

Json thetas_to_json(const std::map<int, double>& thetas) {
  Json t = Json::object();
  for (const auto& [id, theta] : thetas) t[std::to_string(id)] = theta;
  return {{"thetas", t}};
}

std::map<int, double> thetas_from_json(const Json& j) {
  const Json& t = field(j, "thetas");
  if (!t.is_object()) throw FormatError("thetas must be an object");
  std::map<int, double> out;
  for (const auto& [key, value] : t.items()) {
    std::size_t used = 0;
    int id = 0;
    try {
      id = std::stoi(key, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != key.size() || key.empty()) throw FormatError("theta key '" + key + "' is not an object id");
    out[id] = number(value, "theta");
  }
  return out;
}

}  // namespace sceneforge
