#include "sceneforge/error.hpp"
#include "sceneforge/io.hpp"

namespace sceneforge {

namespace {

double finite_number(const Json& j, const char* what) {
  if (!j.is_number()) throw FormatError(std::string(what) + " must be a number");
  const double d = j.get<double>();
  if (!std::isfinite(d)) throw FormatError(std::string(what) + " must be finite");
  return d;
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  return j.at(key);
}

}  // namespace

Json to_json(const Aabb& box) { return Json::array({box.x_min, box.y_min, box.x_max, box.y_max}); }

Aabb aabb_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4) throw FormatError("box must be [x_min, y_min, x_max, y_max]");
  Aabb b{finite_number(j[0], "box"), finite_number(j[1], "box"), finite_number(j[2], "box"),
         finite_number(j[3], "box")};
  if (!b.valid()) throw FormatError("box must have min <= max");
  return b;
}

Json to_json(const Vec2& p) { return Json::array({p.x, p.y}); }

Vec2 vec2_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw FormatError("point must be [x, y]");
  return {finite_number(j[0], "point"), finite_number(j[1], "point")};
}

namespace {

Json walls_to_json(const std::vector<Wall>& walls) {
  Json out = Json::array();
  for (const Wall& w : walls) out.push_back({{"p1", to_json(w.p1)}, {"p2", to_json(w.p2)}});
  return out;
}

std::vector<Wall> walls_from_json(const Json& j) {
  if (!j.is_array()) throw FormatError("walls must be an array");
  std::vector<Wall> out;
  for (const Json& w : j) {
    Wall wall{vec2_from_json(field(w, "p1")), vec2_from_json(field(w, "p2"))};
    if (wall.p1 == wall.p2) throw FormatError("wall endpoints must differ");
    out.push_back(wall);
  }
  return out;
}

}  // namespace

Json to_json(const Layout& layout) {
  Json objects = Json::array();
  for (const PlacedObject& o : layout.objects) {
    objects.push_back({
        {"id", o.id},
        {"category", o.category},
        {"box", to_json(o.box)},
        {"role", o.role == Role::kPrimary ? "primary" : "dependent"},
        {"target", o.dependency_target ? Json(*o.dependency_target) : Json(nullptr)},
        {"call", o.instantiating_call},
    });
  }
  return {{"room_bounds", to_json(layout.room_bounds)},
          {"walls", walls_to_json(layout.walls)},
          {"objects", std::move(objects)}};
}

Layout layout_from_json(const Json& j) {
  Layout layout;
  layout.room_bounds = aabb_from_json(field(j, "room_bounds"));
  if (j.contains("walls")) {
    layout.walls = walls_from_json(j.at("walls"));
  } else {
    layout.walls = Room::rectangular(layout.room_bounds).walls;
  }
  const Json& objects = field(j, "objects");
  if (!objects.is_array()) throw FormatError("objects must be an array");
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const Json& o = objects[i];
    PlacedObject p;
    p.id = o.contains("id") ? o.at("id").get<int>() : static_cast<int>(i);
    p.category = field(o, "category").get<std::string>();
    p.box = aabb_from_json(field(o, "box"));
    const std::string role = o.value("role", std::string("primary"));
    if (role != "primary" && role != "dependent") throw FormatError("role must be primary or dependent");
    p.role = role == "primary" ? Role::kPrimary : Role::kDependent;
    if (o.contains("target") && !o.at("target").is_null()) p.dependency_target = o.at("target").get<int>();
    if ((p.role == Role::kDependent) != p.dependency_target.has_value()) {
      throw FormatError("object " + std::to_string(p.id) + ": dependent objects need a target, primary objects none");
    }
    p.instantiating_call = o.value("call", std::string());
    layout.objects.push_back(std::move(p));
  }
  return layout;
}

Room room_from_json(const Json& j) {
  Room room;
  room.bounds = aabb_from_json(field(j, "room_bounds"));
  room.walls = j.contains("walls") ? walls_from_json(j.at("walls")) : Room::rectangular(room.bounds).walls;
  return room;
}

Json to_json(const Room& room) {
  return {{"room_bounds", to_json(room.bounds)}, {"walls", walls_to_json(room.walls)}};
}

}  // namespace sceneforge
