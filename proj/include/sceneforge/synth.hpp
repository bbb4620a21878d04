#pragma once

#include <random>
#include <string>
#include <string_view>

#include "sceneforge/dsl.hpp"
#include "sceneforge/interp.hpp"

namespace sceneforge {

/// The fourteen indoor categories used for palettes, features and fixtures.
inline constexpr std::string_view kSceneCategories[] = {
    "armchair", "bed",  "bookshelf",  "cabinet", "chair", "coffee_table", "couch",
    "desk",     "dresser", "lamp", "nightstand", "shelf", "stool", "table",
};

namespace synth {

/// Room used by generated programs.
Room room();

/// 1 to `max_patterns` placements drawn from every built-in, each on its own
/// category, with spacings at least 0.1 m wider than the objects they separate.
/// Coordinates are on a 0.05 m grid.
dsl::Program stdlib_program(std::mt19937_64& rng, int max_patterns = 5);

/// Layout made mostly of grids and rows of equal objects plus a few singles.
dsl::Program grid_row_program(std::mt19937_64& rng);

enum class Theme { kBedroom, kLivingRoom };

/// Furnished rooms of one kind: a bed with nightstands and storage, or a
/// couch facing a coffee table with seats and shelving. The two kinds share
/// no categories.
dsl::Program themed_program(std::mt19937_64& rng, Theme theme);

}  // namespace synth

}  // namespace sceneforge
