// Regenerates the fixtures/ directory shipped with the repository.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>

#include "sceneforge/assemble.hpp"
#include "sceneforge/dsl.hpp"
#include "sceneforge/interp.hpp"
#include "sceneforge/io.hpp"
#include "sceneforge/library.hpp"
#include "sceneforge/pose.hpp"
#include "sceneforge/synth.hpp"

namespace fs = std::filesystem;
using namespace sceneforge;

namespace {

std::string numbered(const std::string& prefix, int i) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%02d", prefix.c_str(), i);
  return buf;
}

void write_layouts(const fs::path& dir, const std::string& prefix, int count, std::uint64_t seed, bool themed) {
  fs::create_directories(dir);
  std::mt19937_64 rng(seed);
  for (int i = 0; i < count; ++i) {
    const dsl::Program p = themed ? synth::themed_program(rng, i % 2 ? synth::Theme::kBedroom : synth::Theme::kLivingRoom)
                                  : synth::grid_row_program(rng);
    const Layout l = execute(p, Library::standard(), synth::room());
    write_file(dir / (numbered(prefix, i) + ".json"), dump_json(to_json(l)));
    if (themed) write_file(dir / (numbered(prefix, i) + ".scene"), dsl::format(p));
  }
}

// Three sizes per category, fronts cycling through the quarter turns.
AssetCatalog catalog() {
  AssetCatalog c;
  int k = 0;
  for (std::string_view cat : kSceneCategories)
    for (double s : {0.6, 1.0, 1.6}) {
      c.entries.push_back({std::string(cat) + "_" + std::to_string(static_cast<int>(s * 10)), std::string(cat), s,
                           0.6 * s, 90.0 * (k % 4)});
      ++k;
    }
  return c;
}

Json scan() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Json objects = Json::array();
  const std::pair<const char*, Vec2> shapes[] = {{"table", {1.6, 0.8}}, {"bed", {2.0, 1.6}}, {"desk", {1.4, 0.7}},
                                                 {"stool", {0.5, 0.48}}, {"shelf", {1.0, 0.3}}};
  for (const auto& [category, size] : shapes) {
    const double theta = 5.0 * std::floor(u(rng) * 36);
    const Vec2 center{1 + 8 * u(rng), 1 + 8 * u(rng)};
    Json points = Json::array();
    for (int i = 0; i < 24; ++i) {
      const Vec2 local{(u(rng) - 0.5) * size.x, (u(rng) - 0.5) * size.y};
      points.push_back(to_json(center + rotate(local, theta)));
    }
    for (auto [sx, sy] : {std::pair{-1, -1}, {1, -1}, {1, 1}, {-1, 1}})
      points.push_back(to_json(center + rotate({0.5 * sx * size.x, 0.5 * sy * size.y}, theta)));
    objects.push_back({{"category", category}, {"points", points}});
  }
  objects.push_back({{"category", "lamp"}, {"points", Json::array({to_json(Vec2{3, 3})})}});
  return {{"objects", objects}};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <fixtures-dir>\n";
    return 2;
  }
  const fs::path root = argv[1];
  fs::create_directories(root);
  write_file(root / "room.json", dump_json(to_json(synth::room())));
  write_layouts(root / "corpus", "layout", 12, 11, false);
  write_layouts(root / "reference", "reference", 8, 12, true);
  write_file(root / "catalog.json", dump_json(to_json(catalog())));
  write_file(root / "pose_train.jsonl", pose_dataset_to_jsonl(synthetic_pose_dataset(40, 13)));
  write_file(root / "scan.json", dump_json(scan()));
  write_file(root / "one_bed.scene", "bed = furniture(1, 1, 3, 3)\n");
  std::cout << "fixtures written to " << root << "\n";
  return 0;
}
