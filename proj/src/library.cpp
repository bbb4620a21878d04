#include "sceneforge/library.hpp"

#include <algorithm>
#include <sstream>

#include "sceneforge/error.hpp"

namespace sceneforge {

bool is_builtin_name(std::string_view name) {
  return std::find(std::begin(kBuiltinNames), std::end(kBuiltinNames), name) != std::end(kBuiltinNames);
}

Library Library::bootstrap() {
  Library lib;
  lib.builtins = {"furniture", "parallel"};
  return lib;
}

Library Library::standard() {
  Library lib;
  for (std::string_view n : kBuiltinNames) lib.builtins.insert(std::string(n));
  return lib;
}

bool Library::has_builtin(std::string_view name) const {
  return builtins.count(std::string(name)) > 0;
}

const dsl::FuncDef* Library::find(std::string_view name) const {
  for (const dsl::FuncDef& f : functions) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

Library Library::with_function(dsl::FuncDef def) const {
  if (is_builtin_name(def.name)) throw Error("'" + def.name + "' is a reserved built-in name");
  if (find(def.name)) throw Error("library already defines '" + def.name + "'");
  Library next = *this;
  next.functions.push_back(std::move(def));
  next.version = version + 1;
  return next;
}

std::string serialize_library(const Library& library) {
  std::string out = "# scenelib v" + std::to_string(library.version) + "\n# builtins";
  // Keep documentation order rather than std::set order.
  for (std::string_view n : kBuiltinNames) {
    if (library.has_builtin(n)) out += " " + std::string(n);
  }
  out += "\n";
  for (const dsl::FuncDef& f : library.functions) out += dsl::format(f);
  return out;
}

Library parse_library(std::string_view text) {
  Library lib;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line.rfind("# scenelib v", 0) != 0) {
    throw FormatError("library text must start with '# scenelib v<N>'");
  }
  try {
    lib.version = std::stoi(line.substr(12));
  } catch (const std::exception&) {
    throw FormatError("malformed scenelib version line: " + line);
  }
  bool saw_builtins = false;
  if (std::getline(in, line) && line.rfind("# builtins", 0) == 0) {
    saw_builtins = true;
    std::istringstream names(line.substr(10));
    std::string n;
    while (names >> n) {
      if (!is_builtin_name(n)) throw FormatError("unknown built-in '" + n + "' in library header");
      lib.builtins.insert(n);
    }
  }
  if (!saw_builtins) lib.builtins = Library::standard().builtins;

  dsl::Program prog = dsl::parse(text);
  if (!prog.statements.empty()) throw FormatError("library files may only contain def blocks");
  for (dsl::FuncDef& f : prog.defs) {
    if (is_builtin_name(f.name)) throw FormatError("library redefines built-in '" + f.name + "'");
    if (lib.find(f.name)) throw FormatError("library defines '" + f.name + "' twice");
    lib.functions.push_back(std::move(f));
  }
  return lib;
}

namespace {

std::size_t count_calls(const dsl::Expr& e) {
  std::size_t n = 0;
  if (const auto* c = std::get_if<dsl::Call>(&e.node)) {
    if (c->callee != "furniture") ++n;
    for (const dsl::Expr& a : c->args) n += count_calls(a);
  } else if (const auto* t = std::get_if<dsl::Tuple>(&e.node)) {
    for (const dsl::Expr& a : t->items) n += count_calls(a);
  } else if (const auto* l = std::get_if<dsl::ListLit>(&e.node)) {
    for (const dsl::Expr& a : l->items) n += count_calls(a);
  } else if (const auto* b = std::get_if<dsl::BinOp>(&e.node)) {
    n += count_calls(*b->lhs) + count_calls(*b->rhs);
  }
  return n;
}

}  // namespace

std::size_t count_high_level_calls(const dsl::Program& program) {
  std::size_t n = 0;
  for (const dsl::Stmt& s : program.statements) {
    if (const auto* a = std::get_if<dsl::Assign>(&s.node)) n += count_calls(a->value);
    if (const auto* x = std::get_if<dsl::ExprStmt>(&s.node)) n += count_calls(x->value);
  }
  return n;
}

double funcs_per_program(std::span<const dsl::Program> corpus) {
  if (corpus.empty()) throw Error("funcs_per_program needs a non-empty corpus");
  double total = 0.0;
  for (const dsl::Program& p : corpus) total += static_cast<double>(count_high_level_calls(p));
  return total / static_cast<double>(corpus.size());
}

double mean_description_length(std::span<const dsl::Program> corpus) {
  if (corpus.empty()) return 0.0;
  double total = 0.0;
  for (const dsl::Program& p : corpus) total += static_cast<double>(dsl::description_length(p));
  return total / static_cast<double>(corpus.size());
}

}  // namespace sceneforge
