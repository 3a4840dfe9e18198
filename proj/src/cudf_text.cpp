#include "cudfmoo/cudf_text.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

namespace cudf {

namespace {

using cudfmoo::ParseDiagnostic;
using Severity = ParseDiagnostic::Severity;

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

std::string_view trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

struct LogicalLine {
  std::string text;
  int line;  // first physical line, 1-based
};

std::vector<LogicalLine> logical_lines(std::string_view text) {
  std::vector<LogicalLine> physical;
  int lineno = 1;
  size_t start = 0;
  for (size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '\n') {
      std::string_view raw = text.substr(start, i - start);
      if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
      physical.push_back({std::string(raw), lineno});
      ++lineno;
      start = i + 1;
    }
  }
  if (!physical.empty() && physical.back().text.empty()) physical.pop_back();

  // Drop comment lines, then join continuations.
  std::vector<LogicalLine> kept;
  for (auto& l : physical) {
    std::string_view t = trim(l.text);
    if (!t.empty() && t[0] == '#') continue;
    kept.push_back(std::move(l));
  }
  std::vector<LogicalLine> out;
  for (size_t i = 0; i < kept.size(); ++i) {
    LogicalLine cur = kept[i];
    while (!cur.text.empty() && cur.text.back() == '\\' &&
           i + 1 < kept.size()) {
      cur.text.pop_back();
      std::string_view head = trim(cur.text);
      std::string_view tail = trim(kept[i + 1].text);
      cur.text = std::string(head);
      if (!tail.empty()) {
        cur.text += ' ';
        cur.text += tail;
      }
      ++i;
    }
    out.push_back(std::move(cur));
  }
  return out;
}

struct RawProperty {
  std::string name;
  std::string value;
  int line;
  int value_col;
};

struct RawStanza {
  std::vector<RawProperty> props;
  int line;
};

// A small cursor over one property value.
struct Cursor {
  std::string_view s;
  size_t pos = 0;
  int line;
  int col_base;
  std::vector<ParseDiagnostic>* diags;
  bool failed = false;

  void error(const std::string& msg) {
    if (failed) return;
    failed = true;
    diags->push_back(ParseDiagnostic{line, col_base + static_cast<int>(pos),
                                     msg, Severity::error});
  }
  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
      ++pos;
  }
  bool eof() {
    skip_ws();
    return pos >= s.size();
  }
  char peek() const { return pos < s.size() ? s[pos] : '\0'; }
  bool eat(char c) {
    skip_ws();
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect_end(const std::string& what) {
    if (!eof()) error("trailing input after " + what);
  }
};

bool name_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' ||
         c == '+' || c == '.';
}

std::string parse_name_token(Cursor& c) {
  c.skip_ws();
  size_t b = c.pos;
  while (c.pos < c.s.size() && name_char(c.s[c.pos])) ++c.pos;
  std::string tok(c.s.substr(b, c.pos - b));
  if (tok.empty() || !valid_pkg_name(tok)) {
    c.pos = b;
    c.error("expected a name");
  }
  return tok;
}

std::int64_t parse_int_token(Cursor& c) {
  c.skip_ws();
  size_t b = c.pos;
  if (c.peek() == '-' || c.peek() == '+') ++c.pos;
  while (c.pos < c.s.size() &&
         std::isdigit(static_cast<unsigned char>(c.s[c.pos])))
    ++c.pos;
  std::int64_t out = 0;
  auto sub = c.s.substr(b, c.pos - b);
  auto res = std::from_chars(sub.data(), sub.data() + sub.size(), out);
  if (sub.empty() || res.ec != std::errc{} ||
      res.ptr != sub.data() + sub.size()) {
    c.pos = b;
    c.error("expected an integer");
  }
  return out;
}

Version parse_version_token(Cursor& c) {
  std::int64_t v = parse_int_token(c);
  if (!c.failed && v < 1) c.error("version must be a positive integer");
  return Version{v};
}

std::optional<ConstraintOp> parse_op(Cursor& c) {
  c.skip_ws();
  auto rest = c.s.substr(c.pos);
  auto take = [&](std::string_view tok, ConstraintOp op) ->
      std::optional<ConstraintOp> {
        if (rest.substr(0, tok.size()) == tok) {
          c.pos += tok.size();
          return op;
        }
        return std::nullopt;
      };
  if (auto op = take("!=", ConstraintOp::neq)) return op;
  if (auto op = take("<=", ConstraintOp::leq)) return op;
  if (auto op = take(">=", ConstraintOp::geq)) return op;
  if (auto op = take("=", ConstraintOp::eq)) return op;
  if (auto op = take("<", ConstraintOp::lt)) return op;
  if (auto op = take(">", ConstraintOp::gt)) return op;
  return std::nullopt;
}

VPkg parse_vpkg(Cursor& c) {
  VPkg out;
  out.name = PkgName{parse_name_token(c)};
  if (c.failed) return out;
  c.skip_ws();
  if (auto op = parse_op(c)) {
    out.constraint.op = *op;
    out.constraint.version = parse_version_token(c);
  }
  return out;
}

VpkgClause parse_clause(Cursor& c) {
  VpkgClause clause;
  clause.push_back(parse_vpkg(c));
  while (!c.failed && c.eat('|')) clause.push_back(parse_vpkg(c));
  return clause;
}

VpkgFormula parse_formula(Cursor& c) {
  VpkgFormula f;
  c.skip_ws();
  if (trim(c.s.substr(c.pos)) == "true") {
    c.pos = c.s.size();
    return f;
  }
  f.clauses.push_back(parse_clause(c));
  while (!c.failed && c.eat(',')) f.clauses.push_back(parse_clause(c));
  return f;
}

std::vector<VPkg> parse_vpkg_list(Cursor& c) {
  std::vector<VPkg> out;
  if (c.eof()) return out;
  out.push_back(parse_vpkg(c));
  while (!c.failed && c.eat(',')) out.push_back(parse_vpkg(c));
  return out;
}

std::vector<ProvidedFeature> parse_provides(Cursor& c) {
  std::vector<ProvidedFeature> out;
  if (c.eof()) return out;
  for (;;) {
    ProvidedFeature f;
    f.name = PkgName{parse_name_token(c)};
    if (c.failed) break;
    if (auto op = parse_op(c)) {
      if (*op != ConstraintOp::eq) {
        c.error("a provided feature version must use '='");
        break;
      }
      f.version = parse_version_token(c);
    }
    out.push_back(f);
    if (!c.eat(',')) break;
  }
  return out;
}

std::string parse_quoted(Cursor& c) {
  std::string out;
  if (!c.eat('"')) {
    c.error("expected '\"'");
    return out;
  }
  while (c.pos < c.s.size()) {
    char ch = c.s[c.pos++];
    if (ch == '"') return out;
    if (ch == '\\') {
      if (c.pos >= c.s.size()) break;
      char esc = c.s[c.pos++];
      if (esc == '"') out += '"';
      else if (esc == '\\') out += '\\';
      else if (esc == 'n') out += '\n';
      else {
        c.pos -= 1;
        c.error("unknown string escape");
        return out;
      }
    } else {
      out += ch;
    }
  }
  c.error("unterminated string");
  return out;
}

std::string parse_string_value(Cursor& c) {
  c.skip_ws();
  if (c.peek() == '"') {
    std::string out = parse_quoted(c);
    c.expect_end("string");
    return out;
  }
  std::string out(trim(c.s.substr(c.pos)));
  c.pos = c.s.size();
  return out;
}

std::string parse_enum_label(Cursor& c, const std::vector<std::string>& labels) {
  c.skip_ws();
  std::string label;
  if (c.peek() == '"') {
    label = parse_quoted(c);
    c.expect_end("enum value");
  } else {
    label = parse_name_token(c);
    if (!c.failed) c.expect_end("enum value");
  }
  if (c.failed) return label;
  if (std::find(labels.begin(), labels.end(), label) == labels.end())
    c.error("value '" + label + "' is not among the declared enum labels");
  return label;
}

PropertyValue parse_typed_value(Cursor& c, const PropertyType& t) {
  PropertyValue out;
  switch (t.kind) {
    case PropertyKind::integer: {
      auto v = parse_int_token(c);
      if (!c.failed) c.expect_end("integer");
      out.v = v;
      break;
    }
    case PropertyKind::boolean: {
      c.skip_ws();
      auto rest = trim(c.s.substr(c.pos));
      c.pos = c.s.size();
      if (rest == "true") out.v = true;
      else if (rest == "false") out.v = false;
      else c.error("expected 'true' or 'false'");
      break;
    }
    case PropertyKind::string:
      out.v = parse_string_value(c);
      break;
    case PropertyKind::enumeration:
      out.v = EnumValue{parse_enum_label(c, t.enum_labels)};
      break;
    case PropertyKind::pkgname: {
      auto n = parse_name_token(c);
      if (!c.failed) c.expect_end("name");
      out.v = PkgName{n};
      break;
    }
    case PropertyKind::vpkglist: {
      auto l = parse_vpkg_list(c);
      if (!c.failed) c.expect_end("package list");
      out.v = std::move(l);
      break;
    }
    case PropertyKind::vpkgformula: {
      auto f = parse_formula(c);
      if (!c.failed) c.expect_end("package formula");
      out.v = std::move(f);
      break;
    }
  }
  return out;
}

PropertyType parse_property_type(Cursor& c) {
  PropertyType t;
  c.skip_ws();
  std::string word = parse_name_token(c);
  if (c.failed) return t;
  if (word == "int") t.kind = PropertyKind::integer;
  else if (word == "bool") t.kind = PropertyKind::boolean;
  else if (word == "string") t.kind = PropertyKind::string;
  else if (word == "pkgname") t.kind = PropertyKind::pkgname;
  else if (word == "vpkglist") t.kind = PropertyKind::vpkglist;
  else if (word == "vpkgformula") t.kind = PropertyKind::vpkgformula;
  else if (word == "enum") {
    t.kind = PropertyKind::enumeration;
    if (!c.eat('(')) {
      c.error("expected '(' after enum");
      return t;
    }
    for (;;) {
      std::string label = parse_name_token(c);
      if (c.failed) return t;
      if (std::find(t.enum_labels.begin(), t.enum_labels.end(), label) !=
          t.enum_labels.end()) {
        c.error("duplicate enum label '" + label + "'");
        return t;
      }
      t.enum_labels.push_back(label);
      if (c.eat(',')) continue;
      break;
    }
    if (!c.eat(')')) c.error("expected ')' after enum labels");
  } else {
    c.error("unknown property type '" + word + "'");
  }
  return t;
}

const char* const kCoreNames[] = {"package",  "version",   "depends",
                                  "conflicts", "provides", "installed",
                                  "keep"};

bool is_core_name(std::string_view n) {
  for (auto* c : kCoreNames)
    if (n == c) return true;
  return false;
}

struct DocParser {
  std::vector<ParseDiagnostic> diags;

  void error(int line, int col, std::string msg) {
    diags.push_back(ParseDiagnostic{line, col, std::move(msg),
                                    Severity::error});
  }

  Cursor cursor(const RawProperty& p) {
    return Cursor{p.value, 0, p.line, p.value_col, &diags, false};
  }

  std::vector<RawStanza> stanzas(std::string_view text) {
    std::vector<RawStanza> out;
    RawStanza cur;
    auto flush = [&] {
      if (!cur.props.empty()) out.push_back(std::move(cur));
      cur = RawStanza{};
    };
    for (auto& line : logical_lines(text)) {
      if (is_blank(line.text)) {
        flush();
        continue;
      }
      size_t colon = line.text.find(':');
      if (colon == std::string::npos) {
        error(line.line, 1, "expected 'name: value'");
        continue;
      }
      std::string name(trim(std::string_view(line.text).substr(0, colon)));
      std::string value(trim(std::string_view(line.text).substr(colon + 1)));
      if (cur.props.empty()) cur.line = line.line;
      cur.props.push_back(RawProperty{std::move(name), std::move(value),
                                      line.line, static_cast<int>(colon) + 2});
    }
    flush();
    return out;
  }

  std::optional<Preamble> parse_preamble(const RawStanza& st) {
    Preamble pre;
    for (size_t i = 1; i < st.props.size(); ++i) {
      const auto& p = st.props[i];
      if (p.name != "property") {
        error(p.line, 1, "unknown preamble property '" + p.name + "'");
        continue;
      }
      Cursor c = cursor(p);
      std::string pname = parse_name_token(c);
      if (c.failed) continue;
      if (!c.eat(':')) {
        c.error("expected ':' after property name");
        continue;
      }
      PropertyType t = parse_property_type(c);
      if (c.failed) continue;
      if (c.eat('=')) {
        t.default_value = parse_typed_value(c, t);
        if (c.failed) continue;
      } else if (!c.eof()) {
        c.error("trailing input after property type");
        continue;
      }
      if (is_core_name(pname)) {
        error(p.line, 1, "property '" + pname + "' shadows a core property");
        continue;
      }
      if (pre.find(pname)) {
        error(p.line, 1, "duplicate property declaration '" + pname + "'");
        continue;
      }
      pre.declarations.emplace_back(std::move(pname), std::move(t));
    }
    return pre;
  }

  std::optional<PackageDesc> parse_package(const RawStanza& st,
                                           const Preamble* pre) {
    PackageDesc pkg;
    bool ok = true;
    bool saw_version = false;
    std::vector<std::string> seen;
    for (const auto& p : st.props) {
      if (std::find(seen.begin(), seen.end(), p.name) != seen.end()) {
        error(p.line, 1, "duplicate property '" + p.name + "' in stanza");
        ok = false;
        continue;
      }
      seen.push_back(p.name);
      Cursor c = cursor(p);
      if (p.name == "package") {
        pkg.name = PkgName{parse_name_token(c)};
        if (!c.failed) c.expect_end("package name");
      } else if (p.name == "version") {
        pkg.version = parse_version_token(c);
        if (!c.failed) c.expect_end("version");
        saw_version = true;
      } else if (p.name == "depends") {
        pkg.depends = parse_formula(c);
        if (!c.failed) c.expect_end("package formula");
      } else if (p.name == "conflicts") {
        pkg.conflicts = parse_vpkg_list(c);
        if (!c.failed) c.expect_end("package list");
      } else if (p.name == "provides") {
        pkg.provides = parse_provides(c);
        if (!c.failed) c.expect_end("provides list");
      } else if (p.name == "installed") {
        PropertyType bt{PropertyKind::boolean, {}, {}};
        auto v = parse_typed_value(c, bt);
        if (!c.failed) pkg.installed = std::get<bool>(v.v);
      } else if (p.name == "keep") {
        std::string w = parse_name_token(c);
        if (!c.failed) c.expect_end("keep value");
        if (w == "none") pkg.keep = Keep::none;
        else if (w == "version") pkg.keep = Keep::version;
        else if (w == "package") pkg.keep = Keep::package;
        else if (w == "feature") pkg.keep = Keep::feature;
        else c.error("keep must be none, version, package or feature");
      } else {
        const PropertyType* t = pre ? pre->find(p.name) : nullptr;
        if (!t) {
          error(p.line, 1, "undeclared property '" + p.name + "'");
          ok = false;
          continue;
        }
        auto v = parse_typed_value(c, *t);
        if (!c.failed) pkg.extra.emplace_back(p.name, std::move(v));
      }
      if (c.failed) ok = false;
    }
    if (!saw_version) {
      error(st.line, 1, "package stanza is missing 'version'");
      ok = false;
    }
    // Fill defaults for declared properties not present in the stanza, and
    // normalise the extras to preamble declaration order.
    if (pre) {
      std::vector<std::pair<std::string, PropertyValue>> ordered;
      for (const auto& [n, t] : pre->declarations) {
        if (const PropertyValue* v = pkg.find_extra(n)) {
          ordered.emplace_back(n, *v);
        } else if (t.default_value) {
          ordered.emplace_back(n, *t.default_value);
        } else {
          error(st.line, 1,
                "package stanza is missing required property '" + n + "'");
          ok = false;
        }
      }
      pkg.extra = std::move(ordered);
    }
    if (!ok) return std::nullopt;
    return pkg;
  }

  std::optional<Request> parse_request(const RawStanza& st) {
    Request req;
    bool ok = true;
    std::vector<std::string> seen;
    for (size_t i = 1; i < st.props.size(); ++i) {
      const auto& p = st.props[i];
      if (std::find(seen.begin(), seen.end(), p.name) != seen.end()) {
        error(p.line, 1, "duplicate property '" + p.name + "' in stanza");
        ok = false;
        continue;
      }
      seen.push_back(p.name);
      Cursor c = cursor(p);
      if (p.name == "install") {
        req.install = parse_vpkg_list(c);
        if (!c.failed) c.expect_end("package list");
      } else if (p.name == "remove") {
        req.remove = parse_vpkg_list(c);
        if (!c.failed) c.expect_end("package list");
      } else if (p.name == "upgrade") {
        req.upgrade = parse_vpkg_list(c);
        if (!c.failed) c.expect_end("package list");
      } else if (p.name == "preferences") {
        req.preferences = p.value;
      } else {
        error(p.line, 1, "unknown request property '" + p.name + "'");
        ok = false;
      }
      if (c.failed) ok = false;
    }
    if (!ok) return std::nullopt;
    return req;
  }
};

}  // namespace

Result<CudfDoc> parse_document(std::string_view text) {
  DocParser parser;
  CudfDoc doc;
  bool saw_request = false;
  bool ok = true;

  auto sts = parser.stanzas(text);
  for (size_t i = 0; i < sts.size(); ++i) {
    const auto& st = sts[i];
    if (st.props.empty()) continue;
    const std::string& head = st.props[0].name;
    if (head == "preamble") {
      if (i != 0) {
        parser.error(st.line, 1, "preamble must be the first stanza");
        ok = false;
        continue;
      }
      doc.preamble = parser.parse_preamble(st);
    } else if (head == "package") {
      if (saw_request) {
        parser.error(st.line, 1, "package stanza after the request stanza");
        ok = false;
        continue;
      }
      auto pkg = parser.parse_package(
          st, doc.preamble ? &*doc.preamble : nullptr);
      if (!pkg) {
        ok = false;
        continue;
      }
      bool dup = false;
      for (const auto& q : doc.universe)
        if (q.name == pkg->name && q.version == pkg->version) dup = true;
      if (dup) {
        parser.error(st.line, 1,
                     "duplicate package " + pkg->name.value + " version " +
                         std::to_string(pkg->version.value));
        ok = false;
        continue;
      }
      doc.universe.push_back(std::move(*pkg));
    } else if (head == "request") {
      if (saw_request) {
        parser.error(st.line, 1, "duplicate request stanza");
        ok = false;
        continue;
      }
      saw_request = true;
      auto req = parser.parse_request(st);
      if (!req) {
        ok = false;
        continue;
      }
      doc.request = std::move(*req);
    } else {
      parser.error(st.line, 1, "unknown stanza '" + head + "'");
      ok = false;
    }
  }
  if (!saw_request) {
    parser.error(0, 0, "missing request stanza");
    ok = false;
  }
  if (!ok) return Result<CudfDoc>::failure(std::move(parser.diags));
  return Result<CudfDoc>{std::move(doc), std::move(parser.diags)};
}

Result<Solution> parse_solution(std::string_view text, const CudfDoc& against) {
  DocParser parser;
  Solution sol;
  bool ok = true;

  auto sts = parser.stanzas(text);
  for (size_t i = 0; i < sts.size(); ++i) {
    const auto& st = sts[i];
    if (st.props.empty()) continue;
    const std::string& head = st.props[0].name;
    if (head == "preamble" && i == 0) continue;  // tolerated and ignored
    if (head == "request") {
      parser.error(st.line, 1, "a solution must not contain a request stanza");
      ok = false;
      continue;
    }
    if (head != "package") {
      parser.error(st.line, 1, "unknown stanza '" + head + "'");
      ok = false;
      continue;
    }
    // Only the identity and the installed flag matter for a status; any
    // other property of a solution stanza is ignored unparsed.
    PackageDesc pkg;
    bool stanza_ok = true;
    bool saw_version = false;
    for (const auto& p : st.props) {
      Cursor c = parser.cursor(p);
      if (p.name == "package") {
        pkg.name = PkgName{parse_name_token(c)};
        if (!c.failed) c.expect_end("package name");
      } else if (p.name == "version") {
        pkg.version = parse_version_token(c);
        if (!c.failed) c.expect_end("version");
        saw_version = true;
      } else if (p.name == "installed") {
        PropertyType bt{PropertyKind::boolean, {}, {}};
        auto v = parse_typed_value(c, bt);
        if (!c.failed) pkg.installed = std::get<bool>(v.v);
      } else {
        continue;
      }
      if (c.failed) stanza_ok = false;
    }
    if (!saw_version) {
      parser.error(st.line, 1, "package stanza is missing 'version'");
      stanza_ok = false;
    }
    if (!stanza_ok) {
      ok = false;
      continue;
    }
    if (!against.find(pkg.ref())) {
      parser.error(st.line, 1,
                   "solution mentions unknown package " + pkg.name.value +
                       " version " + std::to_string(pkg.version.value));
      ok = false;
      continue;
    }
    if (pkg.installed) sol.installed.insert(pkg.ref());
  }
  if (!ok) return Result<Solution>::failure(std::move(parser.diags));
  return Result<Solution>{std::move(sol), std::move(parser.diags)};
}

std::string print_document(const CudfDoc& doc) {
  std::ostringstream out;
  bool first = true;
  auto stanza_break = [&] {
    if (!first) out << "\n";
    first = false;
  };

  if (doc.preamble) {
    stanza_break();
    out << "preamble:\n";
    for (const auto& [n, t] : doc.preamble->declarations)
      out << "property: " << n << ": " << to_string(t) << "\n";
  }

  for (const auto& p : doc.universe) {
    stanza_break();
    out << "package: " << p.name.value << "\n";
    out << "version: " << p.version.value << "\n";
    if (!p.depends.is_true())
      out << "depends: " << to_string(p.depends) << "\n";
    if (!p.provides.empty()) {
      out << "provides: ";
      for (size_t i = 0; i < p.provides.size(); ++i) {
        if (i) out << ", ";
        out << to_string(p.provides[i]);
      }
      out << "\n";
    }
    if (!p.conflicts.empty())
      out << "conflicts: " << vpkglist_to_string(p.conflicts) << "\n";
    if (p.installed) out << "installed: true\n";
    if (p.keep != Keep::none) out << "keep: " << to_string(p.keep) << "\n";
    if (doc.preamble) {
      for (const auto& [n, t] : doc.preamble->declarations) {
        const PropertyValue* v = p.find_extra(n);
        if (!v) continue;
        if (t.default_value && *v == *t.default_value) continue;
        out << n << ": " << to_string(*v) << "\n";
      }
    }
  }

  stanza_break();
  out << "request:\n";
  const Request& r = doc.request;
  if (!r.install.empty()) out << "install: " << vpkglist_to_string(r.install) << "\n";
  if (!r.remove.empty()) out << "remove: " << vpkglist_to_string(r.remove) << "\n";
  if (!r.upgrade.empty()) out << "upgrade: " << vpkglist_to_string(r.upgrade) << "\n";
  if (r.preferences) out << "preferences: " << *r.preferences << "\n";
  return out.str();
}

std::string print_solution(const Solution& s) {
  std::ostringstream out;
  bool first = true;
  for (const auto& ref : s.installed) {
    if (!first) out << "\n";
    first = false;
    out << "package: " << ref.name.value << "\n";
    out << "version: " << ref.version.value << "\n";
    out << "installed: true\n";
  }
  return out.str();
}

}  // namespace cudf
