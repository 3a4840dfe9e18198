#pragma once

#include <string>
#include <string_view>

#include "cudfmoo/cudf_model.hpp"
#include "cudfmoo/diagnostics.hpp"

namespace cudf {

using cudfmoo::ParseDiagnostic;
using cudfmoo::Result;

// Parses a CUDF document: optional preamble stanza, package stanzas, one
// request stanza, separated by blank lines.  Lines whose first non-blank
// character is '#' are comments; a line ending in a backslash joins the next
// line.  Parsing never throws; malformed input yields diagnostics.
Result<CudfDoc> parse_document(std::string_view text);

// Prints a document in canonical form: stanza order preamble / universe /
// request, properties in fixed order, default-valued properties omitted.
// parse_document(print_document(d)) reproduces d.
std::string print_document(const CudfDoc& doc);

// Parses an installation status given as a CUDF package-list fragment: one
// stanza per installed package (installed: false stanzas are ignored).
// Every mentioned (name, version) must exist in `against`.
Result<Solution> parse_solution(std::string_view text, const CudfDoc& against);

// Prints a status as a package-list fragment.
std::string print_solution(const Solution& s);

}  // namespace cudf
