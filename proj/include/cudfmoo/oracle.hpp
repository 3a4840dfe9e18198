#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cudfmoo/cudf_model.hpp"
#include "cudfmoo/cudf_semantics.hpp"
#include "cudfmoo/diagnostics.hpp"
#include "cudfmoo/mooml_ast.hpp"
#include "cudfmoo/mooml_eval.hpp"

namespace oracle {

// 2^20 statuses is the most this brute-force oracle will chew through.
inline constexpr std::size_t kDefaultUniverseLimit = 20;

// Every valid solution of the document, enumerated in increasing bit-vector
// order where bit i selects the i-th package of the universe sorted by
// (name, version). Refuses universes larger than `limit`. Intended for the
// small instances of tests and golden files; the result can hold up to 2^n
// solutions.
cudfmoo::Result<std::vector<cudf::Solution>> enumerate_valid(
    const cudf::CudfDoc& doc, std::size_t limit = kDefaultUniverseLimit);

struct SolveResult {
  std::optional<cudf::Solution> best;
  std::optional<mooml::Outcome> outcome;
  std::uint64_t explored = 0;     // statuses enumerated (2^n)
  std::uint64_t valid_count = 0;  // valid solutions among them
  std::uint64_t admissible = 0;   // valid, constraint holds, no runtime error
  std::uint64_t ties = 0;         // admissible outcomes equal to the best
  std::uint64_t exec_errors = 0;  // valid candidates discarded on a runtime
                                  // error of the preference program
};

// Exhaustive lexicographic optimization: among valid solutions whose
// constraint holds and whose evaluation raises no error, returns the first
// (smallest bit-vector) solution whose outcome no other beats. `best` is
// absent when no admissible solution exists.
cudfmoo::Result<SolveResult> solve_optimal(
    const cudf::CudfDoc& doc, const mooml::MoomlProgram& prog,
    std::size_t limit = kDefaultUniverseLimit);

}  // namespace oracle
