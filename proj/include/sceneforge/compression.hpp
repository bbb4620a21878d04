#pragma once

#include <span>
#include <string>
#include <vector>

#include "sceneforge/dsl.hpp"
#include "sceneforge/library.hpp"

namespace sceneforge {

/// How a function parameter is used by its body.
enum class ParamKind {
  kObject,     // reference argument of a placement call
  kCount,      // loop bound, align count, grid rows/cols
  kDirection,  // direction code 1..4
  kNumber,     // continuous quantity
  kOpaque,     // passed whole where a tuple or list is expected
};

std::vector<ParamKind> classify_params(const dsl::FuncDef& def, const Library& library);

struct CompressionReport {
  dsl::FuncDef candidate;
  std::size_t tokens_before = 0;
  std::size_t tokens_after = 0;
  std::size_t definition_cost = 0;
  long long gain = 0;
  std::size_t programs_rewritten = 0;
};

struct RewriteResult {
  std::vector<dsl::Program> corpus;
  CompressionReport report;
};

inline constexpr long long kDefaultMinGain = 8;

/// Greedily replaces statement groups of `program` by calls to `function`,
/// which must be defined in `library`. Every replacement is checked by
/// execution: the rewritten program reconstructs the original boxes exactly.
dsl::Program rewrite_program(const dsl::Program& program, const std::string& function,
                             const Library& library);

/// Scores `candidate` against the corpus under `library` plus the candidate.
/// Throws ExecError when the candidate body cannot be executed at all.
RewriteResult rewrite_corpus(std::span<const dsl::Program> corpus, const dsl::FuncDef& candidate,
                             const Library& library);

bool accept_candidate(const CompressionReport& report, long long min_gain = kDefaultMinGain);

}  // namespace sceneforge
