#pragma once

#include <string>
#include <string_view>

#include "cudfmoo/diagnostics.hpp"
#include "cudfmoo/mooml_ast.hpp"

namespace mooml {

using cudfmoo::ParseDiagnostic;
using cudfmoo::Result;

// Parses a preference program: let-definitions, then an optional
// `constraint` expression, then `minimize` / `maximize` criteria.
// Definitions cannot be recursive and must have distinct names.
Result<MoomlProgram> parse_program(std::string_view text);

// Parses a single expression (used by tests and tools).
Result<ExprPtr> parse_expr_text(std::string_view text);

// Canonical printing.  parse_program(print_program(p)) yields a program
// structurally equal to p.
std::string print_program(const MoomlProgram& p);
std::string print_expr(const ExprPtr& e);
std::string print_pattern(const PatternPtr& p);
std::string print_type_expr(const TypeExprPtr& t);

}  // namespace mooml
