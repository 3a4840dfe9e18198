#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace mooml {

struct Pos {
  int line = 0;
  int column = 0;
};

// ---------------------------------------------------------------------------
// Literals

struct EnumLit {
  std::string label;  // written 'label
  bool operator==(const EnumLit&) const = default;
};

struct Literal {
  std::variant<std::int64_t, bool, std::string, EnumLit> v;
  bool operator==(const Literal&) const = default;
};

// ---------------------------------------------------------------------------
// Surface types (ascriptions)

struct TypeExpr;
using TypeExprPtr = std::shared_ptr<const TypeExpr>;

struct TypeExpr {
  enum class Kind {
    int_,
    bool_,
    string_,
    version,
    pkgname,
    formula,
    unit,
    package,
    request,
    enum_,
    list,
    tuple,
    arrow,
  };
  Kind kind;
  std::vector<std::string> enum_labels;  // enum_
  std::vector<TypeExprPtr> args;         // list: 1; arrow: 2; tuple: n
};

bool equal(const TypeExprPtr& a, const TypeExprPtr& b);

// ---------------------------------------------------------------------------
// Patterns

struct Pattern;
using PatternPtr = std::shared_ptr<const Pattern>;

struct Pattern {
  enum class Kind {
    wildcard,  // *
    var,
    lit,
    unit,
    tuple,
    record,
    empty_list,
    cons,
  };
  Kind kind;
  Pos pos;
  std::string name;  // var
  Literal lit;       // lit
  std::vector<PatternPtr> items;                          // tuple; cons: 2
  std::vector<std::pair<std::string, PatternPtr>> fields;  // record
};

bool equal(const PatternPtr& a, const PatternPtr& b);
void pattern_vars(const PatternPtr& p, std::vector<std::string>& out);

// ---------------------------------------------------------------------------
// Expressions

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct MatchArm {
  PatternPtr pattern;
  ExprPtr body;
};

struct Expr {
  enum class Kind {
    var,
    lit,
    unit,
    lambda,   // fun name -> body
    app,      // fn arg
    tuple,    // arity >= 2
    record,   // {l = e, ...}
    empty_list,
    cons,     // head :: tail
    proj,     // e.label
    let,      // let pattern = value in body
    match,
    ascribe,  // (e : T)
  };
  Kind kind;
  Pos pos;

  std::string name;   // var; lambda param; proj label
  Literal lit;        // lit
  std::vector<ExprPtr> items;  // app: fn,arg; tuple; cons: head,tail;
                               // lambda: body; proj: e; let: value,body;
                               // ascribe: e
  std::vector<std::pair<std::string, ExprPtr>> fields;  // record
  PatternPtr pattern;              // let
  std::vector<MatchArm> arms;      // match: items[0] scrutinee
  TypeExprPtr ascription;          // ascribe
};

// Constructors.
ExprPtr make_var(std::string name, Pos pos = {});
ExprPtr make_lit(Literal lit, Pos pos = {});
ExprPtr make_unit(Pos pos = {});
ExprPtr make_lambda(std::string param, ExprPtr body, Pos pos = {});
ExprPtr make_app(ExprPtr fn, ExprPtr arg, Pos pos = {});
ExprPtr make_tuple(std::vector<ExprPtr> items, Pos pos = {});
ExprPtr make_record(std::vector<std::pair<std::string, ExprPtr>> fields,
                    Pos pos = {});
ExprPtr make_empty_list(Pos pos = {});
ExprPtr make_cons(ExprPtr head, ExprPtr tail, Pos pos = {});
ExprPtr make_proj(ExprPtr e, std::string label, Pos pos = {});
ExprPtr make_let(PatternPtr pattern, ExprPtr value, ExprPtr body,
                 Pos pos = {});
ExprPtr make_match(ExprPtr scrutinee, std::vector<MatchArm> arms,
                   Pos pos = {});
ExprPtr make_ascribe(ExprPtr e, TypeExprPtr ty, Pos pos = {});

// if c then a else b is sugar for match on true/false.
ExprPtr make_if(ExprPtr cond, ExprPtr then_e, ExprPtr else_e, Pos pos = {});
bool is_if(const Expr& e);

// Structural equality; source positions are ignored.
bool equal(const ExprPtr& a, const ExprPtr& b);

// Free identifiers of an expression.
std::set<std::string> free_vars(const ExprPtr& e);

// Capture-avoiding substitution of free identifiers.
ExprPtr substitute(const ExprPtr& e,
                   const std::map<std::string, ExprPtr>& subst);

// Number of expression nodes (used for evaluation step budgets in tests).
std::size_t node_count(const ExprPtr& e);

// ---------------------------------------------------------------------------
// Programs

enum class Polarity { minimize, maximize };

struct Definition {
  std::string name;
  ExprPtr body;  // parameters are folded into nested lambdas
  Pos pos;
};

struct Criterion {
  Polarity polarity;
  ExprPtr expr;
};

struct MoomlProgram {
  std::vector<Definition> definitions;
  std::optional<ExprPtr> constraint;
  std::vector<Criterion> criteria;
};

bool equal(const MoomlProgram& a, const MoomlProgram& b);
std::size_t node_count(const MoomlProgram& p);

// Names bound by the standard library.
const std::vector<std::string>& stdlib_names();
bool is_stdlib_name(const std::string& name);

}  // namespace mooml
