#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "sceneforge/interp.hpp"

namespace sceneforge {

using Json = nlohmann::json;

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

/// Rounds every floating value to 9 significant digits so dumps are stable
/// and diffable; object keys are already sorted by nlohmann::json.
Json round_floats(const Json& value);
/// Pretty-printed, sorted-key, rounded JSON text with a trailing newline.
std::string dump_json(const Json& value);
Json parse_json(const std::string& text, const std::string& what);

Json to_json(const Aabb& box);
Aabb aabb_from_json(const Json& j);
Json to_json(const Vec2& p);
Vec2 vec2_from_json(const Json& j);

/// `{ "room_bounds": [...], "walls": [{"p1": [x,y], "p2": [x,y]}...],
///    "objects": [{"id", "category", "box", "role", "target", "call"}...] }`.
/// Wall orientation is derived, never stored. On input, role/target/call may
/// be omitted (primary, no target, empty call).
Json to_json(const Layout& layout);
Layout layout_from_json(const Json& j);

/// Room file: `room_bounds` and optional `walls` (defaults to the four
/// sides of the bounds).
Room room_from_json(const Json& j);
Json to_json(const Room& room);

}  // namespace sceneforge
