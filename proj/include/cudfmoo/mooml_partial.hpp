#pragma once

#include <map>
#include <string>
#include <vector>

#include "cudfmoo/cudf_model.hpp"
#include "cudfmoo/diagnostics.hpp"
#include "cudfmoo/mooml_ast.hpp"

namespace mooml {

// One pre-computed package property: a fresh name, its declared CUDF type,
// and one value per (name, version) of the universe it was computed from.
struct FreshProperty {
  std::string name;
  cudf::PropertyType declared_type;
  std::map<cudf::PkgRef, cudf::PropertyValue> values;
};

// The document rewrite that accompanies a simplified program: an ordered
// list of fresh properties to declare and attach to every package.
struct Transformer {
  std::vector<FreshProperty> properties;
};

struct PartialEvalResult {
  MoomlProgram program;
  Transformer transformer;
};

// Substitutes every definition into the constraint and the criteria.
// Definitions are non-recursive, so this terminates; the result carries no
// definitions and evaluates exactly like the input.
MoomlProgram inline_definitions(const MoomlProgram& prog);

// Rewrites solution-independent package -> t sub-expressions of the
// constraint and criteria into fresh-property lookups:
//   - a sub-expression whose value ignores is-installed entirely is
//     evaluated once per universe package and becomes `fun x -> x.<fresh>`;
//   - one that depends only on its argument's own is-installed flag is
//     evaluated twice per package and becomes an is-installed dispatch
//     between two fresh properties;
//   - anything else (and anything whose pre-computation hits a runtime
//     error) is left intact.
// A definition of such a shape that the rewrite leaves unreferenced also
// has its pre-computed values materialized, with inner package -> t bodies
// replaced by lookups of the same property.
// Fails only when the program does not typecheck against doc's preamble;
// the worst successful case is the identity rewrite with an empty
// transformer.
cudfmoo::Result<PartialEvalResult> partially_evaluate(
    const cudf::CudfDoc& doc, const MoomlProgram& prog);

// Extends the preamble and every package stanza with the transformer's
// properties. Fails when a fresh name is already declared or some universe
// package has no recorded value.
cudfmoo::Result<cudf::CudfDoc> apply_transformer(const Transformer& t,
                                                 const cudf::CudfDoc& doc);

}  // namespace mooml
