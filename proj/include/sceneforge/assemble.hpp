#pragma once

#include <map>
#include <string>
#include <vector>

#include "sceneforge/geometry.hpp"
#include "sceneforge/interp.hpp"
#include "sceneforge/io.hpp"

namespace sceneforge {

struct AssetEntry {
  std::string asset_id;
  std::string category;
  double width = 0.0;
  double depth = 0.0;
  /// Facing direction in the asset's own frame, degrees in [0, 360).
  double front = 0.0;

  friend bool operator==(const AssetEntry&, const AssetEntry&) = default;
};

struct AssetCatalog {
  std::vector<AssetEntry> entries;

  /// Throws FormatError for non-positive dims, uppercase categories, a front
  /// outside [0, 360) or a repeated asset id.
  void validate() const;
  std::vector<std::string> categories() const;
};

Json to_json(const AssetCatalog& catalog);
AssetCatalog catalog_from_json(const Json& j);

/// Headings are measured counter-clockwise from -y: heading 0 faces -y,
/// heading 90 faces +x.
Vec2 heading_vector(double degrees);

struct Retrieval {
  const AssetEntry* entry = nullptr;
  /// The entry matched with width and depth exchanged.
  bool swapped = false;
  double distance = 0.0;
};

/// Nearest same-category entry by footprint size, either way round. Ties
/// go to the smallest asset id; an exact tie between the two ways keeps
/// the unswapped one. Throws CategoryMissing.
Retrieval retrieve(const OrientedBox& obb, const std::string& category, const AssetCatalog& catalog);

/// Room bounds for a primary; for a dependent, the union of its target and
/// every object sharing that target.
Aabb region_boundary(const PlacedObject& object, const Layout& layout);

/// Unit vector pointing from the nearest point of the region's outline to
/// `p`. Equidistant edges contribute jointly, so the exact center of the
/// region yields zero.
Vec2 away_from_boundary(Vec2 p, const Aabb& region);

/// Heading in [0, 360): front + r for whichever r in {theta, theta + 180}
/// faces away from the region outline; r = theta on a tie.
double resolve_facing(const OrientedBox& obb, const Aabb& region, double front);

struct Placement {
  int object_id = 0;
  std::string asset_id;
  Vec2 translation;
  /// Degrees in [0, 360).
  double rotation = 0.0;
  Vec2 scale;
  bool swapped = false;

  friend bool operator==(const Placement&, const Placement&) = default;
};

struct AssembledScene {
  std::vector<Placement> placements;
};

/// Corners of an entry's footprint after applying `placement`; the depth
/// and width axes are exchanged first when the placement is swapped.
std::array<Vec2, 4> placed_footprint(const Placement& placement, const AssetEntry& entry);

AssembledScene assemble(const Layout& layout, const std::map<int, double>& thetas, const AssetCatalog& catalog);

Json to_json(const AssembledScene& scene);
AssembledScene assembled_scene_from_json(const Json& j);

/// `{"thetas": {"<id>": degrees, ...}}`.
Json thetas_to_json(const std::map<int, double>& thetas);
std::map<int, double> thetas_from_json(const Json& j);

}  // namespace sceneforge
