#include <map>
#include <sstream>
#include <vector>

#include "cudfmoo/mooml_syntax.hpp"

namespace mooml {

namespace {

// Precedence levels, mirroring the parser (higher binds tighter).
constexpr int kLevelOpen = 0;  // fun / let-in / match / if
constexpr int kLevelOr = 1;
constexpr int kLevelAnd = 2;
constexpr int kLevelCmp = 3;
constexpr int kLevelCons = 4;
constexpr int kLevelAdd = 5;
constexpr int kLevelNot = 6;
constexpr int kLevelApp = 7;
constexpr int kLevelProj = 8;
constexpr int kLevelAtom = 9;

struct InfixInfo {
  const char* symbol;
  int level;
};

// Detects `app (app (var op) a) b` for a printable infix operator.
const InfixInfo* infix_info(const ExprPtr& e, ExprPtr* lhs, ExprPtr* rhs) {
  static const std::map<std::string, InfixInfo> table = {
      {"or", {"||", kLevelOr}},  {"and", {"&&", kLevelAnd}},
      {"eq", {"=", kLevelCmp}},  {"neq", {"!=", kLevelCmp}},
      {"lt", {"<", kLevelCmp}},  {"leq", {"<=", kLevelCmp}},
      {"gt", {">", kLevelCmp}},  {"geq", {">=", kLevelCmp}},
      {"add", {"+", kLevelAdd}}, {"sub", {"-", kLevelAdd}},
  };
  if (e->kind != Expr::Kind::app) return nullptr;
  const ExprPtr& inner = e->items[0];
  if (inner->kind != Expr::Kind::app) return nullptr;
  const ExprPtr& head = inner->items[0];
  if (head->kind != Expr::Kind::var) return nullptr;
  auto it = table.find(head->name);
  if (it == table.end()) return nullptr;
  *lhs = inner->items[1];
  *rhs = e->items[1];
  return &it->second;
}

bool is_not_app(const ExprPtr& e, ExprPtr* operand) {
  if (e->kind != Expr::Kind::app) return false;
  const ExprPtr& head = e->items[0];
  if (head->kind != Expr::Kind::var || head->name != "not") return false;
  *operand = e->items[1];
  return true;
}

// List-literal sugar applies when a cons spine terminates in [].
bool list_spine(const ExprPtr& e, std::vector<ExprPtr>* items) {
  const Expr* cur = e.get();
  std::vector<ExprPtr> out;
  while (cur->kind == Expr::Kind::cons) {
    out.push_back(cur->items[0]);
    cur = cur->items[1].get();
  }
  if (cur->kind != Expr::Kind::empty_list) return false;
  *items = std::move(out);
  return true;
}

int level_of(const ExprPtr& e) {
  ExprPtr a, b;
  switch (e->kind) {
    case Expr::Kind::lambda:
    case Expr::Kind::let:
    case Expr::Kind::match:
      return kLevelOpen;
    case Expr::Kind::cons: {
      std::vector<ExprPtr> items;
      return list_spine(e, &items) ? kLevelAtom : kLevelCons;
    }
    case Expr::Kind::app:
      if (const InfixInfo* info = infix_info(e, &a, &b)) return info->level;
      if (is_not_app(e, &a)) return kLevelNot;
      return kLevelApp;
    case Expr::Kind::proj:
      return kLevelProj;
    default:
      return kLevelAtom;  // var, lit, unit, tuple, record, [], ascription
  }
}

// True when the rightmost open edge of the printed form is a match whose
// arm list would capture a following '|'.
bool ends_in_open_match(const ExprPtr& e) {
  ExprPtr a, b;
  switch (e->kind) {
    case Expr::Kind::match:
      if (is_if(*e)) return ends_in_open_match(e->arms[1].body);
      return true;
    case Expr::Kind::lambda:
      return ends_in_open_match(e->items[0]);
    case Expr::Kind::let:
      return ends_in_open_match(e->items[1]);
    case Expr::Kind::cons: {
      std::vector<ExprPtr> items;
      if (list_spine(e, &items)) return false;
      return ends_in_open_match(e->items[1]);
    }
    case Expr::Kind::app:
      if (infix_info(e, &a, &b)) return ends_in_open_match(b);
      if (is_not_app(e, &a)) return ends_in_open_match(a);
      return false;  // plain application arguments print at atom tightness
    default:
      return false;
  }
}

std::string escape_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\\\"";
    else if (c == '\\') out += "\\\\";
    else if (c == '\n') out += "\\n";
    else out += c;
  }
  out += '"';
  return out;
}

std::string literal_text(const Literal& lit) {
  switch (lit.v.index()) {
    case 0: return std::to_string(std::get<std::int64_t>(lit.v));
    case 1: return std::get<bool>(lit.v) ? "true" : "false";
    case 2: return escape_string(std::get<std::string>(lit.v));
    default: return "'" + std::get<EnumLit>(lit.v).label;
  }
}

void print_expr_rec(std::ostringstream& os, const ExprPtr& e, int min_level);

void print_pattern_rec(std::ostringstream& os, const PatternPtr& p,
                       bool atom_position) {
  switch (p->kind) {
    case Pattern::Kind::wildcard:
      os << '*';
      break;
    case Pattern::Kind::var:
      os << p->name;
      break;
    case Pattern::Kind::lit:
      os << literal_text(p->lit);
      break;
    case Pattern::Kind::unit:
      os << "()";
      break;
    case Pattern::Kind::empty_list:
      os << "[]";
      break;
    case Pattern::Kind::tuple: {
      os << '(';
      for (size_t i = 0; i < p->items.size(); ++i) {
        if (i) os << ", ";
        // `(*` would open a comment; keep the star off the paren.
        if (i == 0 && p->items[0]->kind == Pattern::Kind::wildcard) os << ' ';
        print_pattern_rec(os, p->items[i], false);
      }
      os << ')';
      break;
    }
    case Pattern::Kind::record: {
      os << '{';
      for (size_t i = 0; i < p->fields.size(); ++i) {
        if (i) os << ", ";
        os << p->fields[i].first << " = ";
        print_pattern_rec(os, p->fields[i].second, false);
      }
      os << '}';
      break;
    }
    case Pattern::Kind::cons: {
      if (atom_position) os << '(';
      print_pattern_rec(os, p->items[0], true);
      os << " :: ";
      print_pattern_rec(os, p->items[1], false);
      if (atom_position) os << ')';
      break;
    }
  }
}

void print_type_rec(std::ostringstream& os, const TypeExprPtr& t,
                    int min_level) {
  // 0 = arrow, 1 = tuple, 2 = atom.
  switch (t->kind) {
    case TypeExpr::Kind::int_: os << "int"; return;
    case TypeExpr::Kind::bool_: os << "bool"; return;
    case TypeExpr::Kind::string_: os << "string"; return;
    case TypeExpr::Kind::version: os << "version"; return;
    case TypeExpr::Kind::pkgname: os << "pkgname"; return;
    case TypeExpr::Kind::formula: os << "formula"; return;
    case TypeExpr::Kind::unit: os << "unit"; return;
    case TypeExpr::Kind::package: os << "package"; return;
    case TypeExpr::Kind::request: os << "request"; return;
    case TypeExpr::Kind::enum_: {
      os << "enum(";
      for (size_t i = 0; i < t->enum_labels.size(); ++i) {
        if (i) os << ", ";
        os << t->enum_labels[i];
      }
      os << ')';
      return;
    }
    case TypeExpr::Kind::list:
      os << "list ";
      print_type_rec(os, t->args[0], 2);
      return;
    case TypeExpr::Kind::tuple: {
      if (min_level > 1) os << '(';
      for (size_t i = 0; i < t->args.size(); ++i) {
        if (i) os << " * ";
        print_type_rec(os, t->args[i], 2);
      }
      if (min_level > 1) os << ')';
      return;
    }
    case TypeExpr::Kind::arrow: {
      if (min_level > 0) os << '(';
      print_type_rec(os, t->args[0], 1);
      os << " -> ";
      print_type_rec(os, t->args[1], 0);
      if (min_level > 0) os << ')';
      return;
    }
  }
}

void print_arm_body(std::ostringstream& os, const ExprPtr& body, bool last) {
  if (!last && ends_in_open_match(body)) {
    os << '(';
    print_expr_rec(os, body, kLevelOpen);
    os << ')';
  } else {
    print_expr_rec(os, body, kLevelOpen);
  }
}

void print_expr_rec(std::ostringstream& os, const ExprPtr& e, int min_level) {
  int lvl = level_of(e);
  bool parens = lvl < min_level;
  if (parens) os << '(';

  ExprPtr a, b;
  switch (e->kind) {
    case Expr::Kind::var:
      os << e->name;
      break;
    case Expr::Kind::lit:
      os << literal_text(e->lit);
      break;
    case Expr::Kind::unit:
      os << "()";
      break;
    case Expr::Kind::lambda: {
      os << "fun";
      ExprPtr body = e;
      while (body->kind == Expr::Kind::lambda) {
        os << ' ' << body->name;
        body = body->items[0];
      }
      os << " -> ";
      print_expr_rec(os, body, kLevelOpen);
      break;
    }
    case Expr::Kind::app: {
      if (const InfixInfo* info = infix_info(e, &a, &b)) {
        print_expr_rec(os, a, info->level);
        os << ' ' << info->symbol << ' ';
        print_expr_rec(os, b, info->level + 1);
      } else if (is_not_app(e, &a)) {
        os << "not ";
        print_expr_rec(os, a, kLevelNot);
      } else {
        print_expr_rec(os, e->items[0], kLevelApp);
        os << ' ';
        print_expr_rec(os, e->items[1], kLevelProj);
      }
      break;
    }
    case Expr::Kind::tuple: {
      os << '(';
      for (size_t i = 0; i < e->items.size(); ++i) {
        if (i) os << ", ";
        print_expr_rec(os, e->items[i], kLevelOpen);
      }
      os << ')';
      break;
    }
    case Expr::Kind::record: {
      os << '{';
      for (size_t i = 0; i < e->fields.size(); ++i) {
        if (i) os << ", ";
        os << e->fields[i].first << " = ";
        print_expr_rec(os, e->fields[i].second, kLevelOpen);
      }
      os << '}';
      break;
    }
    case Expr::Kind::empty_list:
      os << "[]";
      break;
    case Expr::Kind::cons: {
      std::vector<ExprPtr> items;
      if (list_spine(e, &items)) {
        os << '[';
        for (size_t i = 0; i < items.size(); ++i) {
          if (i) os << "; ";
          print_expr_rec(os, items[i], kLevelOpen);
        }
        os << ']';
      } else {
        print_expr_rec(os, e->items[0], kLevelCons + 1);
        os << " :: ";
        print_expr_rec(os, e->items[1], kLevelCons);
      }
      break;
    }
    case Expr::Kind::proj:
      print_expr_rec(os, e->items[0], kLevelProj);
      os << '.' << e->name;
      break;
    case Expr::Kind::let: {
      os << "let ";
      print_pattern_rec(os, e->pattern, false);
      os << " = ";
      print_expr_rec(os, e->items[0], kLevelOpen);
      os << " in ";
      print_expr_rec(os, e->items[1], kLevelOpen);
      break;
    }
    case Expr::Kind::match: {
      if (is_if(*e)) {
        os << "if ";
        print_expr_rec(os, e->items[0], kLevelOr);
        os << " then ";
        print_expr_rec(os, e->arms[0].body, kLevelOpen);
        os << " else ";
        print_expr_rec(os, e->arms[1].body, kLevelOpen);
      } else {
        os << "match ";
        print_expr_rec(os, e->items[0], kLevelOr);
        os << " with ";
        for (size_t i = 0; i < e->arms.size(); ++i) {
          if (i) os << " | ";
          print_pattern_rec(os, e->arms[i].pattern, false);
          os << " => ";
          print_arm_body(os, e->arms[i].body, i + 1 == e->arms.size());
        }
      }
      break;
    }
    case Expr::Kind::ascribe: {
      os << '(';
      print_expr_rec(os, e->items[0], kLevelOpen);
      os << " : ";
      print_type_rec(os, e->ascription, 0);
      os << ')';
      break;
    }
  }
  if (parens) os << ')';
}

}  // namespace

std::string print_expr(const ExprPtr& e) {
  std::ostringstream os;
  print_expr_rec(os, e, kLevelOpen);
  return os.str();
}

std::string print_pattern(const PatternPtr& p) {
  std::ostringstream os;
  print_pattern_rec(os, p, false);
  return os.str();
}

std::string print_type_expr(const TypeExprPtr& t) {
  std::ostringstream os;
  print_type_rec(os, t, 0);
  return os.str();
}

std::string print_program(const MoomlProgram& prog) {
  std::ostringstream os;
  bool first = true;
  auto sep = [&] {
    if (!first) os << '\n';
    first = false;
  };
  for (const auto& def : prog.definitions) {
    sep();
    os << "let " << def.name;
    ExprPtr body = def.body;
    while (body->kind == Expr::Kind::lambda) {
      os << ' ' << body->name;
      body = body->items[0];
    }
    os << " = ";
    print_expr_rec(os, body, kLevelOpen);
  }
  if (prog.constraint) {
    sep();
    os << "constraint ";
    print_expr_rec(os, *prog.constraint, kLevelOr);
  }
  for (const auto& crit : prog.criteria) {
    sep();
    os << (crit.polarity == Polarity::minimize ? "minimize " : "maximize ");
    print_expr_rec(os, crit.expr, kLevelOr);
  }
  if (!first) os << '\n';
  return os.str();
}

}  // namespace mooml
