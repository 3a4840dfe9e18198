#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "cudfmoo/cudf_model.hpp"
#include "cudfmoo/diagnostics.hpp"
#include "cudfmoo/mooml_ast.hpp"

namespace mooml {

using cudfmoo::ParseDiagnostic;
using cudfmoo::Result;

// Inference types. Variables and open enumerations are mutable cells that
// may acquire a forwarding link during unification; always go through
// resolve() before inspecting a node.
struct Type;
using TypePtr = std::shared_ptr<Type>;

struct Type {
  enum class Kind {
    var,      // unification variable
    int_,
    bool_,
    string_,
    version,
    pkgname,
    formula,
    unit,
    enum_,    // labels; open = "at least these labels"
    tuple,    // args: n >= 2
    list,     // args: 1
    arrow,    // args: domain, codomain
    package,  // args: 1 safety slot (safe_/unsafe_/var)
    request,
    safe_,    // safety constants, valid only in a package's safety slot
    unsafe_,
  };
  Kind kind = Kind::var;
  int id = 0;                    // var and open enum_: identity
  TypePtr link;                  // var and open enum_: forwarding
  bool cmp_tainted = false;      // var: flows into a comparison primitive
  std::set<std::string> labels;  // enum_
  bool open = false;             // enum_
  std::vector<TypePtr> args;
};

// Follows forwarding links to the representative node.
TypePtr resolve(const TypePtr& t);

struct Scheme {
  std::vector<int> quantified;  // ids of generalized variables / open enums
  TypePtr body;
};

// Locality classes of a package -> t expression (safety analysis verdicts).
enum class Locality { local_a, local_b, non_local };

struct TypedProgram {
  std::vector<Scheme> definition_schemes;     // parallel to the definitions
  std::map<const Expr*, TypePtr> node_types;  // every AST node annotated
};

struct TypedExpr {
  Scheme scheme;
  std::map<const Expr*, TypePtr> node_types;
};

// Damas-Milner inference for a whole program. The environment pre-binds the
// standard library, `u` as the package list and `r` as the request record,
// with record fields taken from the preamble (declared extras included).
// Checks that the constraint has type bool and every criterion has type int.
Result<TypedProgram> infer_program(const MoomlProgram& prog,
                                   const cudf::Preamble* preamble);

// Infers the principal scheme of one expression whose free identifiers are
// within the standard library plus {u, r}. With safe_premise, `u` is bound
// to a list of safe package records and is-installed projection demands an
// unsafe record; without it every package record is unsafe.
Result<TypedExpr> infer_expr(const ExprPtr& e, const cudf::Preamble* preamble,
                             bool safe_premise = false);

// Classifies a closed package -> t expression:
//   local_a   — typeable with u safe, argument safety unconstrained or safe
//   local_b   — typeable with u safe, argument forced unsafe
//   non_local — not typeable when u holds safe records
// Errors when the expression does not have type package -> t to begin with.
Result<Locality> classify_locality(const ExprPtr& e,
                                   const cudf::Preamble* preamble);

// Deterministic, alpha-normalized rendering (variables named a, b, ...).
std::string print_type(const TypePtr& t);
std::string print_scheme(const Scheme& s);

// The standard-library schemes in declaration order (preamble-independent).
std::vector<std::pair<std::string, Scheme>> stdlib_env();

}  // namespace mooml
