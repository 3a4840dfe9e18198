#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "cudfmoo/cudf_model.hpp"
#include "cudfmoo/diagnostics.hpp"
#include "cudfmoo/mooml_ast.hpp"

namespace mooml {

struct Value;
using ValuePtr = std::shared_ptr<const Value>;

struct EnvNode {
  std::string name;
  ValuePtr value;
  std::shared_ptr<const EnvNode> next;
};
using EnvPtr = std::shared_ptr<const EnvNode>;

struct Value {
  enum class Kind {
    int_,
    bool_,
    string_,
    enum_,
    version,
    pkgname,
    formula,
    unit,
    tuple,
    record,
    list,
    closure,
    primitive,
  };
  Kind kind = Kind::unit;
  std::int64_t int_value = 0;    // int_
  bool bool_value = false;       // bool_
  std::string text;              // string_ / enum_ label / pkgname /
                                 // closure param / primitive name
  cudf::Version version;         // version
  cudf::VpkgFormula formula;     // formula
  std::vector<ValuePtr> items;   // tuple, list, primitive partial args
  std::vector<std::pair<std::string, ValuePtr>> fields;  // record, ordered
  ExprPtr body;                  // closure
  EnvPtr env;                    // closure capture
};

ValuePtr make_int(std::int64_t v);
ValuePtr make_bool(bool v);
ValuePtr make_string(std::string s);
ValuePtr make_enum(std::string label);
ValuePtr make_version(cudf::Version v);
ValuePtr make_pkgname(std::string name);
ValuePtr make_formula(cudf::VpkgFormula f);
ValuePtr make_unit_value();
ValuePtr make_list(std::vector<ValuePtr> items);

struct ExecError {
  enum class Kind {
    match_failure,
    empty_list_argument,
    division_or_domain,
    missing_field,
  };
  Kind kind = Kind::division_or_domain;
  std::string message;
  Pos pos;

  std::string to_string() const;
};

struct Outcome {
  bool constraint_holds = true;
  std::vector<std::pair<Polarity, std::int64_t>> measures;
};

enum class Comparison { a_better, b_better, equal, incomparable };

// Lexicographic comparison under a strict constraint-first hierarchy.
// Throws std::invalid_argument when the measure shapes or polarities differ.
Comparison compare_outcomes(const Outcome& a, const Outcome& b);

// Evaluation environment for one (document, candidate solution) pair:
// standard library plus `u` (package records in document order, with
// was-installed from the stanza and is-installed from the candidate) and
// `r` (the request record).
struct EvalEnv {
  EnvPtr bindings;
  std::vector<ValuePtr> package_records;  // parallel to doc.universe
  ValuePtr request_record;
};

EvalEnv build_env(const cudf::CudfDoc& doc, const cudf::Solution& proposed);

inline constexpr std::uint64_t kDefaultStepLimit = 200'000'000;

// Call-by-value, left-to-right evaluation. `steps` (when given) accumulates
// the number of evaluation steps taken; exceeding `max_steps` aborts with a
// division_or_domain error, guarding against runaway inputs.
std::variant<ValuePtr, ExecError> eval_expr(
    const EvalEnv& env, const ExprPtr& e, std::uint64_t* steps = nullptr,
    std::uint64_t max_steps = kDefaultStepLimit);

// Applies an already-evaluated function value (closure or primitive).
std::variant<ValuePtr, ExecError> apply_value(
    const ValuePtr& fn, const ValuePtr& arg, std::uint64_t* steps = nullptr,
    std::uint64_t max_steps = kDefaultStepLimit);

// Binds the definitions in order, then evaluates the constraint (true when
// absent) and every criterion.
std::variant<Outcome, ExecError> eval_program(
    const cudf::CudfDoc& doc, const cudf::Solution& proposed,
    const MoomlProgram& prog, std::uint64_t* steps = nullptr,
    std::uint64_t max_steps = kDefaultStepLimit);

// Structural equality as used by the eq primitive; function values make it
// a division_or_domain error.
std::variant<bool, ExecError> value_equal(const ValuePtr& a,
                                          const ValuePtr& b);

std::string value_to_string(const ValuePtr& v);

}  // namespace mooml
