#pragma once

#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sceneforge/dsl.hpp"

namespace sceneforge {

/// Names of the built-in placement functions, in documentation order.
inline constexpr std::string_view kBuiltinNames[] = {
    "furniture", "parallel",    "align",           "grid",
    "grid_with_offset", "symmetrical", "cluster_placement",
};

bool is_builtin_name(std::string_view name);

/// The callable function set: enabled built-ins plus learned definitions.
/// Values are immutable once published; growing the library produces a new
/// value with a bumped version.
struct Library {
  std::set<std::string> builtins;
  std::vector<dsl::FuncDef> functions;
  int version = 0;

  /// Just object instantiation and `parallel`.
  static Library bootstrap();
  /// All seven built-ins.
  static Library standard();

  bool has_builtin(std::string_view name) const;
  const dsl::FuncDef* find(std::string_view name) const;
  bool resolves(std::string_view name) const { return has_builtin(name) || find(name); }

  /// Copy with `def` appended and the version bumped. Throws Error when the
  /// name is taken or reserved.
  Library with_function(dsl::FuncDef def) const;

  friend bool operator==(const Library&, const Library&) = default;
};

/// `.scenelib` text: `# scenelib v<N>`, `# builtins <names...>`, then the
/// canonical text of each definition.
std::string serialize_library(const Library& library);
Library parse_library(std::string_view text);

/// Mean per-program count of call sites whose callee is not `furniture`.
/// Throws Error on an empty corpus.
double funcs_per_program(std::span<const dsl::Program> corpus);

std::size_t count_high_level_calls(const dsl::Program& program);

double mean_description_length(std::span<const dsl::Program> corpus);

}  // namespace sceneforge
