#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sceneforge/error.hpp"
#include "sceneforge/io.hpp"

namespace sceneforge {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

Json round_floats(const Json& value) {
  if (value.is_number_float()) {
    const double d = value.get<double>();
    if (!std::isfinite(d)) return nullptr;
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", d);
    const double r = std::strtod(buf, nullptr);
    return r == 0.0 ? 0.0 : r;  // fold -0
  }
  if (value.is_array()) {
    Json out = Json::array();
    for (const Json& v : value) out.push_back(round_floats(v));
    return out;
  }
  if (value.is_object()) {
    Json out = Json::object();
    for (auto it = value.begin(); it != value.end(); ++it) out[it.key()] = round_floats(it.value());
    return out;
  }
  return value;
}

std::string dump_json(const Json& value) { return round_floats(value).dump(2) + "\n"; }

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw FormatError("malformed JSON in " + what + ": " + e.what());
  }
}

}  // namespace sceneforge
