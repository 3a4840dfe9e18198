#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>

#include "cudfmoo/mooml_syntax.hpp"

namespace mooml {

namespace {

using Severity = ParseDiagnostic::Severity;

enum class Tok {
  eof,
  ident,
  int_lit,
  string_lit,
  enum_lit,
  kw_let,
  kw_in,
  kw_fun,
  kw_match,
  kw_with,
  kw_if,
  kw_then,
  kw_else,
  kw_not,
  kw_true,
  kw_false,
  kw_constraint,
  kw_minimize,
  kw_maximize,
  lparen,
  rparen,
  lbracket,
  rbracket,
  lbrace,
  rbrace,
  comma,
  semicolon,
  dot,
  colon,
  coloncolon,
  arrow,       // ->
  fat_arrow,   // =>
  bar,         // |
  oror,
  andand,
  eq,          // =
  eqeq,        // ==
  neq,
  lt,
  leq,
  gt,
  geq,
  plus,
  minus,
  star,
};

struct Token {
  Tok kind = Tok::eof;
  std::string text;
  std::int64_t int_value = 0;
  Pos pos;
};

const std::map<std::string, Tok>& keywords() {
  static const std::map<std::string, Tok> kw = {
      {"let", Tok::kw_let},       {"in", Tok::kw_in},
      {"fun", Tok::kw_fun},       {"match", Tok::kw_match},
      {"with", Tok::kw_with},     {"if", Tok::kw_if},
      {"then", Tok::kw_then},     {"else", Tok::kw_else},
      {"not", Tok::kw_not},       {"true", Tok::kw_true},
      {"false", Tok::kw_false},   {"constraint", Tok::kw_constraint},
      {"minimize", Tok::kw_minimize}, {"maximize", Tok::kw_maximize},
  };
  return kw;
}

class Lexer {
 public:
  Lexer(std::string_view src, std::vector<ParseDiagnostic>& diags)
      : src_(src), diags_(diags) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      Token t = next();
      out.push_back(t);
      if (t.kind == Tok::eof) break;
      if (failed_) break;
    }
    if (failed_) out.push_back(Token{Tok::eof, "", 0, pos()});
    return out;
  }

  bool failed() const { return failed_; }

 private:
  std::string_view src_;
  std::vector<ParseDiagnostic>& diags_;
  size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
  bool failed_ = false;

  Pos pos() const { return Pos{line_, col_}; }
  char peek(size_t off = 0) const {
    return i_ + off < src_.size() ? src_[i_ + off] : '\0';
  }
  char advance() {
    char c = src_[i_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }
  void error(Pos p, const std::string& msg) {
    if (failed_) return;
    failed_ = true;
    diags_.push_back(ParseDiagnostic{p.line, p.column, msg, Severity::error});
  }

  static bool ident_start(char c) { return c >= 'a' && c <= 'z'; }
  static bool ident_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
  }

  void skip_ws_and_comments() {
    for (;;) {
      while (i_ < src_.size() &&
             std::isspace(static_cast<unsigned char>(peek())))
        advance();
      if (peek() == '(' && peek(1) == '*') {
        Pos p = pos();
        advance();
        advance();
        bool closed = false;
        while (i_ < src_.size()) {
          if (peek() == '*' && peek(1) == ')') {
            advance();
            advance();
            closed = true;
            break;
          }
          advance();
        }
        if (!closed) {
          error(p, "unterminated comment");
          return;
        }
        continue;
      }
      return;
    }
  }

  std::string lex_ident() {
    std::string out;
    out += advance();
    for (;;) {
      char c = peek();
      if (ident_char(c)) {
        out += advance();
      } else if (c == '-' && ident_char(peek(1))) {
        out += advance();
        out += advance();
      } else {
        break;
      }
    }
    return out;
  }

  Token lex_int(bool negative) {
    Pos p = pos();
    std::string digits;
    if (negative) {
      advance();  // '-'
      digits += '-';
    }
    while (std::isdigit(static_cast<unsigned char>(peek())))
      digits += advance();
    std::int64_t v = 0;
    auto res = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (res.ec != std::errc{} || res.ptr != digits.data() + digits.size()) {
      error(p, "integer literal out of range");
      return Token{Tok::eof, "", 0, p};
    }
    return Token{Tok::int_lit, digits, v, p};
  }

  Token lex_string() {
    Pos p = pos();
    advance();  // opening quote
    std::string out;
    while (i_ < src_.size()) {
      char c = advance();
      if (c == '"') return Token{Tok::string_lit, out, 0, p};
      if (c == '\\') {
        if (i_ >= src_.size()) break;
        char esc = advance();
        if (esc == '"') out += '"';
        else if (esc == '\\') out += '\\';
        else if (esc == 'n') out += '\n';
        else {
          error(p, "unknown string escape");
          return Token{Tok::eof, "", 0, p};
        }
      } else if (c == '\n') {
        break;
      } else {
        out += c;
      }
    }
    error(p, "unterminated string literal");
    return Token{Tok::eof, "", 0, p};
  }

  Token next() {
    skip_ws_and_comments();
    Pos p = pos();
    if (i_ >= src_.size() || failed_) return Token{Tok::eof, "", 0, p};
    char c = peek();

    if (ident_start(c)) {
      std::string id = lex_ident();
      auto it = keywords().find(id);
      if (it != keywords().end()) return Token{it->second, id, 0, p};
      return Token{Tok::ident, id, 0, p};
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return lex_int(false);
    if (c == '-' && std::isdigit(static_cast<unsigned char>(peek(1))))
      return lex_int(true);
    if (c == '"') return lex_string();
    if (c == '\'') {
      advance();
      if (!ident_start(peek())) {
        error(p, "expected a label after '");
        return Token{Tok::eof, "", 0, p};
      }
      return Token{Tok::enum_lit, lex_ident(), 0, p};
    }

    auto two = [&](char a, char b) { return c == a && peek(1) == b; };
    if (two(':', ':')) { advance(); advance(); return {Tok::coloncolon, "::", 0, p}; }
    if (two('-', '>')) { advance(); advance(); return {Tok::arrow, "->", 0, p}; }
    if (two('=', '>')) { advance(); advance(); return {Tok::fat_arrow, "=>", 0, p}; }
    if (two('|', '|')) { advance(); advance(); return {Tok::oror, "||", 0, p}; }
    if (two('&', '&')) { advance(); advance(); return {Tok::andand, "&&", 0, p}; }
    if (two('=', '=')) { advance(); advance(); return {Tok::eqeq, "==", 0, p}; }
    if (two('!', '=')) { advance(); advance(); return {Tok::neq, "!=", 0, p}; }
    if (two('<', '=')) { advance(); advance(); return {Tok::leq, "<=", 0, p}; }
    if (two('>', '=')) { advance(); advance(); return {Tok::geq, ">=", 0, p}; }

    switch (c) {
      case '(': advance(); return {Tok::lparen, "(", 0, p};
      case ')': advance(); return {Tok::rparen, ")", 0, p};
      case '[': advance(); return {Tok::lbracket, "[", 0, p};
      case ']': advance(); return {Tok::rbracket, "]", 0, p};
      case '{': advance(); return {Tok::lbrace, "{", 0, p};
      case '}': advance(); return {Tok::rbrace, "}", 0, p};
      case ',': advance(); return {Tok::comma, ",", 0, p};
      case ';': advance(); return {Tok::semicolon, ";", 0, p};
      case '.': advance(); return {Tok::dot, ".", 0, p};
      case ':': advance(); return {Tok::colon, ":", 0, p};
      case '|': advance(); return {Tok::bar, "|", 0, p};
      case '=': advance(); return {Tok::eq, "=", 0, p};
      case '<': advance(); return {Tok::lt, "<", 0, p};
      case '>': advance(); return {Tok::gt, ">", 0, p};
      case '+': advance(); return {Tok::plus, "+", 0, p};
      case '*': advance(); return {Tok::star, "*", 0, p};
      case '-': {
        char after = peek(1);
        if (after == '\0' || std::isspace(static_cast<unsigned char>(after))) {
          advance();
          return {Tok::minus, "-", 0, p};
        }
        error(p, "stray '-'; subtraction needs surrounding spaces");
        return {Tok::eof, "", 0, p};
      }
      default:
        error(p, "unexpected character");
        return {Tok::eof, "", 0, p};
    }
  }
};

class Parser {
 public:
  Parser(std::vector<Token> toks, std::vector<ParseDiagnostic>& diags)
      : toks_(std::move(toks)), diags_(diags) {}

  std::optional<MoomlProgram> program() {
    MoomlProgram prog;
    while (at(Tok::kw_let)) {
      auto def = definition();
      if (!def) return std::nullopt;
      for (const auto& d : prog.definitions) {
        if (d.name == def->name) {
          error(def->pos, "duplicate definition of '" + def->name + "'");
          return std::nullopt;
        }
      }
      prog.definitions.push_back(std::move(*def));
    }
    if (at(Tok::kw_constraint)) {
      eat();
      auto e = expr();
      if (!e) return std::nullopt;
      prog.constraint = e;
    }
    while (at(Tok::kw_minimize) || at(Tok::kw_maximize)) {
      Polarity pol = at(Tok::kw_minimize) ? Polarity::minimize
                                          : Polarity::maximize;
      eat();
      auto e = expr();
      if (!e) return std::nullopt;
      prog.criteria.push_back(Criterion{pol, *e});
    }
    if (!at(Tok::eof)) {
      error(peek().pos, "unexpected input after program");
      return std::nullopt;
    }
    if (!check_recursion(prog)) return std::nullopt;
    return prog;
  }

  std::optional<ExprPtr> single_expr() {
    auto e = expr();
    if (!e) return std::nullopt;
    if (!at(Tok::eof)) {
      error(peek().pos, "unexpected input after expression");
      return std::nullopt;
    }
    return e;
  }

 private:
  std::vector<Token> toks_;
  std::vector<ParseDiagnostic>& diags_;
  size_t i_ = 0;
  bool failed_ = false;

  const Token& peek(size_t off = 0) const {
    size_t j = std::min(i_ + off, toks_.size() - 1);
    return toks_[j];
  }
  bool at(Tok k) const { return peek().kind == k; }
  Token eat() {
    Token t = peek();
    if (i_ + 1 < toks_.size()) ++i_;
    return t;
  }
  void error(Pos p, const std::string& msg) {
    if (failed_) return;
    failed_ = true;
    diags_.push_back(ParseDiagnostic{p.line, p.column, msg, Severity::error});
  }
  bool expect(Tok k, const std::string& what) {
    if (at(k)) {
      eat();
      return true;
    }
    error(peek().pos, "expected " + what);
    return false;
  }

  bool check_recursion(const MoomlProgram& prog) {
    for (const auto& d : prog.definitions) {
      auto fv = free_vars(d.body);
      if (fv.count(d.name) && !is_stdlib_name(d.name) && d.name != "u" &&
          d.name != "r") {
        error(d.pos, "recursion is not permitted in definition of '" +
                         d.name + "'");
        return false;
      }
    }
    return true;
  }

  std::optional<Definition> definition() {
    Pos p = peek().pos;
    eat();  // let
    if (!at(Tok::ident)) {
      error(peek().pos, "expected a definition name");
      return std::nullopt;
    }
    std::string name = eat().text;
    std::vector<std::string> params;
    while (at(Tok::ident)) params.push_back(eat().text);
    if (!expect(Tok::eq, "'=' in definition")) return std::nullopt;
    auto body = expr();
    if (!body) return std::nullopt;
    ExprPtr e = *body;
    for (auto it = params.rbegin(); it != params.rend(); ++it)
      e = make_lambda(*it, e, p);
    return Definition{std::move(name), e, p};
  }

  // -- expressions ----------------------------------------------------------

  std::optional<ExprPtr> expr() {
    if (at(Tok::kw_fun)) return lambda_expr();
    if (at(Tok::kw_match)) return match_expr();
    if (at(Tok::kw_let)) return let_expr();
    if (at(Tok::kw_if)) return if_expr();
    return or_expr();
  }

  std::optional<ExprPtr> lambda_expr() {
    Pos p = eat().pos;  // fun
    std::vector<std::string> params;
    while (at(Tok::ident)) params.push_back(eat().text);
    if (params.empty()) {
      error(peek().pos, "expected a parameter after 'fun'");
      return std::nullopt;
    }
    if (!expect(Tok::arrow, "'->' in function")) return std::nullopt;
    auto body = expr();
    if (!body) return std::nullopt;
    ExprPtr e = *body;
    for (auto it = params.rbegin(); it != params.rend(); ++it)
      e = make_lambda(*it, e, p);
    return e;
  }

  std::optional<ExprPtr> match_expr() {
    Pos p = eat().pos;  // match
    auto scrut = expr();
    if (!scrut) return std::nullopt;
    if (!expect(Tok::kw_with, "'with'")) return std::nullopt;
    if (at(Tok::bar)) eat();
    std::vector<MatchArm> arms;
    for (;;) {
      auto pat = pattern();
      if (!pat) return std::nullopt;
      if (!at(Tok::fat_arrow) && !at(Tok::arrow)) {
        error(peek().pos, "expected '=>' in match arm");
        return std::nullopt;
      }
      eat();
      auto body = expr();
      if (!body) return std::nullopt;
      arms.push_back(MatchArm{*pat, *body});
      if (at(Tok::bar)) {
        eat();
        continue;
      }
      break;
    }
    return make_match(*scrut, std::move(arms), p);
  }

  std::optional<ExprPtr> let_expr() {
    Pos p = eat().pos;  // let
    auto pat = pattern();
    if (!pat) return std::nullopt;
    if (!expect(Tok::eq, "'=' in let")) return std::nullopt;
    auto value = expr();
    if (!value) return std::nullopt;
    if (!expect(Tok::kw_in, "'in'")) return std::nullopt;
    auto body = expr();
    if (!body) return std::nullopt;
    return make_let(*pat, *value, *body, p);
  }

  std::optional<ExprPtr> if_expr() {
    Pos p = eat().pos;  // if
    auto c = expr();
    if (!c) return std::nullopt;
    if (!expect(Tok::kw_then, "'then'")) return std::nullopt;
    auto t = expr();
    if (!t) return std::nullopt;
    if (!expect(Tok::kw_else, "'else'")) return std::nullopt;
    auto f = expr();
    if (!f) return std::nullopt;
    return make_if(*c, *t, *f, p);
  }

  ExprPtr binop(const char* name, ExprPtr a, ExprPtr b, Pos p) {
    return make_app(make_app(make_var(name, p), std::move(a), p), std::move(b),
                    p);
  }

  std::optional<ExprPtr> or_expr() {
    auto a = and_expr();
    if (!a) return std::nullopt;
    while (at(Tok::oror)) {
      Pos p = eat().pos;
      auto b = and_expr();
      if (!b) return std::nullopt;
      a = binop("or", *a, *b, p);
    }
    return a;
  }

  std::optional<ExprPtr> and_expr() {
    auto a = cmp_expr();
    if (!a) return std::nullopt;
    while (at(Tok::andand)) {
      Pos p = eat().pos;
      auto b = cmp_expr();
      if (!b) return std::nullopt;
      a = binop("and", *a, *b, p);
    }
    return a;
  }

  std::optional<ExprPtr> cmp_expr() {
    auto a = cons_expr();
    if (!a) return std::nullopt;
    for (;;) {
      const char* op = nullptr;
      switch (peek().kind) {
        case Tok::eq:
        case Tok::eqeq: op = "eq"; break;
        case Tok::neq: op = "neq"; break;
        case Tok::lt: op = "lt"; break;
        case Tok::leq: op = "leq"; break;
        case Tok::gt: op = "gt"; break;
        case Tok::geq: op = "geq"; break;
        default: return a;
      }
      Pos p = eat().pos;
      auto b = cons_expr();
      if (!b) return std::nullopt;
      a = binop(op, *a, *b, p);
    }
  }

  std::optional<ExprPtr> cons_expr() {
    auto a = add_expr();
    if (!a) return std::nullopt;
    if (at(Tok::coloncolon)) {
      Pos p = eat().pos;
      auto b = cons_expr();
      if (!b) return std::nullopt;
      return make_cons(*a, *b, p);
    }
    return a;
  }

  std::optional<ExprPtr> add_expr() {
    auto a = not_expr();
    if (!a) return std::nullopt;
    for (;;) {
      const char* op = nullptr;
      if (at(Tok::plus)) op = "add";
      else if (at(Tok::minus)) op = "sub";
      else return a;
      Pos p = eat().pos;
      auto b = not_expr();
      if (!b) return std::nullopt;
      a = binop(op, *a, *b, p);
    }
  }

  std::optional<ExprPtr> not_expr() {
    if (at(Tok::kw_not)) {
      Pos p = eat().pos;
      auto a = not_expr();
      if (!a) return std::nullopt;
      return make_app(make_var("not", p), *a, p);
    }
    return app_expr();
  }

  bool starts_postfix() const {
    switch (peek().kind) {
      case Tok::ident:
      case Tok::int_lit:
      case Tok::string_lit:
      case Tok::enum_lit:
      case Tok::kw_true:
      case Tok::kw_false:
      case Tok::lparen:
      case Tok::lbracket:
      case Tok::lbrace:
        return true;
      default:
        return false;
    }
  }

  std::optional<ExprPtr> app_expr() {
    auto a = postfix_expr();
    if (!a) return std::nullopt;
    while (starts_postfix()) {
      Pos p = peek().pos;
      auto b = postfix_expr();
      if (!b) return std::nullopt;
      a = make_app(*a, *b, p);
    }
    return a;
  }

  std::optional<ExprPtr> postfix_expr() {
    auto a = primary_expr();
    if (!a) return std::nullopt;
    while (at(Tok::dot)) {
      Pos p = eat().pos;
      if (!at(Tok::ident)) {
        error(peek().pos, "expected a label after '.'");
        return std::nullopt;
      }
      std::string label = eat().text;
      a = make_proj(*a, std::move(label), p);
    }
    return a;
  }

  std::optional<ExprPtr> primary_expr() {
    Pos p = peek().pos;
    switch (peek().kind) {
      case Tok::ident:
        return make_var(eat().text, p);
      case Tok::int_lit:
        return make_lit(Literal{eat().int_value}, p);
      case Tok::string_lit:
        return make_lit(Literal{eat().text}, p);
      case Tok::enum_lit:
        return make_lit(Literal{EnumLit{eat().text}}, p);
      case Tok::kw_true:
        eat();
        return make_lit(Literal{true}, p);
      case Tok::kw_false:
        eat();
        return make_lit(Literal{false}, p);
      case Tok::lbracket: {
        eat();
        if (at(Tok::rbracket)) {
          eat();
          return make_empty_list(p);
        }
        std::vector<ExprPtr> items;
        for (;;) {
          auto e = expr();
          if (!e) return std::nullopt;
          items.push_back(*e);
          if (at(Tok::semicolon)) {
            eat();
            continue;
          }
          break;
        }
        if (!expect(Tok::rbracket, "']'")) return std::nullopt;
        ExprPtr out = make_empty_list(p);
        for (auto it = items.rbegin(); it != items.rend(); ++it)
          out = make_cons(*it, out, p);
        return out;
      }
      case Tok::lbrace: {
        eat();
        std::vector<std::pair<std::string, ExprPtr>> fields;
        if (!at(Tok::rbrace)) {
          for (;;) {
            if (!at(Tok::ident)) {
              error(peek().pos, "expected a record label");
              return std::nullopt;
            }
            std::string label = eat().text;
            if (!expect(Tok::eq, "'=' in record field")) return std::nullopt;
            auto e = expr();
            if (!e) return std::nullopt;
            for (const auto& [l, unused] : fields) {
              if (l == label) {
                error(p, "duplicate record label '" + label + "'");
                return std::nullopt;
              }
            }
            fields.emplace_back(std::move(label), *e);
            if (at(Tok::comma)) {
              eat();
              continue;
            }
            break;
          }
        }
        if (!expect(Tok::rbrace, "'}'")) return std::nullopt;
        return make_record(std::move(fields), p);
      }
      case Tok::lparen: {
        eat();
        if (at(Tok::rparen)) {
          eat();
          return make_unit(p);
        }
        auto e = expr();
        if (!e) return std::nullopt;
        if (at(Tok::colon)) {
          eat();
          auto t = type_expr();
          if (!t) return std::nullopt;
          if (!expect(Tok::rparen, "')'")) return std::nullopt;
          return make_ascribe(*e, *t, p);
        }
        if (at(Tok::comma)) {
          std::vector<ExprPtr> items{*e};
          while (at(Tok::comma)) {
            eat();
            auto f = expr();
            if (!f) return std::nullopt;
            items.push_back(*f);
          }
          if (!expect(Tok::rparen, "')'")) return std::nullopt;
          return make_tuple(std::move(items), p);
        }
        if (!expect(Tok::rparen, "')'")) return std::nullopt;
        return *e;
      }
      default:
        error(p, "expected an expression");
        return std::nullopt;
    }
  }

  // -- patterns --------------------------------------------------------------

  std::optional<PatternPtr> pattern() {
    auto a = atom_pattern();
    if (!a) return std::nullopt;
    if (at(Tok::coloncolon)) {
      eat();
      auto b = pattern();
      if (!b) return std::nullopt;
      auto q = std::make_shared<Pattern>();
      q->kind = Pattern::Kind::cons;
      q->pos = (*a)->pos;
      q->items = {*a, *b};
      if (!check_linear(q)) return std::nullopt;
      return PatternPtr(q);
    }
    if (!check_linear(*a)) return std::nullopt;
    return a;
  }

  bool check_linear(const PatternPtr& p) {
    std::vector<std::string> vars;
    pattern_vars(p, vars);
    std::sort(vars.begin(), vars.end());
    auto dup = std::adjacent_find(vars.begin(), vars.end());
    if (dup != vars.end()) {
      error(p->pos, "pattern binds '" + *dup + "' more than once");
      return false;
    }
    return true;
  }

  std::optional<PatternPtr> atom_pattern() {
    auto q = std::make_shared<Pattern>();
    q->pos = peek().pos;
    switch (peek().kind) {
      case Tok::star:
        eat();
        q->kind = Pattern::Kind::wildcard;
        return PatternPtr(q);
      case Tok::ident:
        q->kind = Pattern::Kind::var;
        q->name = eat().text;
        return PatternPtr(q);
      case Tok::int_lit:
        q->kind = Pattern::Kind::lit;
        q->lit = Literal{eat().int_value};
        return PatternPtr(q);
      case Tok::string_lit:
        q->kind = Pattern::Kind::lit;
        q->lit = Literal{eat().text};
        return PatternPtr(q);
      case Tok::enum_lit:
        q->kind = Pattern::Kind::lit;
        q->lit = Literal{EnumLit{eat().text}};
        return PatternPtr(q);
      case Tok::kw_true:
        eat();
        q->kind = Pattern::Kind::lit;
        q->lit = Literal{true};
        return PatternPtr(q);
      case Tok::kw_false:
        eat();
        q->kind = Pattern::Kind::lit;
        q->lit = Literal{false};
        return PatternPtr(q);
      case Tok::lbracket:
        eat();
        if (!expect(Tok::rbracket, "']' (only [] is a list pattern)"))
          return std::nullopt;
        q->kind = Pattern::Kind::empty_list;
        return PatternPtr(q);
      case Tok::lbrace: {
        eat();
        q->kind = Pattern::Kind::record;
        if (!at(Tok::rbrace)) {
          for (;;) {
            if (!at(Tok::ident)) {
              error(peek().pos, "expected a record label");
              return std::nullopt;
            }
            std::string label = eat().text;
            if (!expect(Tok::eq, "'=' in record pattern"))
              return std::nullopt;
            auto f = pattern();
            if (!f) return std::nullopt;
            q->fields.emplace_back(std::move(label), *f);
            if (at(Tok::comma)) {
              eat();
              continue;
            }
            break;
          }
        }
        if (!expect(Tok::rbrace, "'}'")) return std::nullopt;
        return PatternPtr(q);
      }
      case Tok::lparen: {
        eat();
        if (at(Tok::rparen)) {
          eat();
          q->kind = Pattern::Kind::unit;
          return PatternPtr(q);
        }
        auto a = pattern();
        if (!a) return std::nullopt;
        if (at(Tok::comma)) {
          std::vector<PatternPtr> items{*a};
          while (at(Tok::comma)) {
            eat();
            auto b = pattern();
            if (!b) return std::nullopt;
            items.push_back(*b);
          }
          if (!expect(Tok::rparen, "')'")) return std::nullopt;
          q->kind = Pattern::Kind::tuple;
          q->items = std::move(items);
          return PatternPtr(q);
        }
        if (!expect(Tok::rparen, "')'")) return std::nullopt;
        return a;
      }
      default:
        error(peek().pos, "expected a pattern");
        return std::nullopt;
    }
  }

  // -- type expressions ------------------------------------------------------

  std::optional<TypeExprPtr> type_expr() {
    auto a = tuple_type();
    if (!a) return std::nullopt;
    if (at(Tok::arrow)) {
      eat();
      auto b = type_expr();
      if (!b) return std::nullopt;
      auto t = std::make_shared<TypeExpr>();
      t->kind = TypeExpr::Kind::arrow;
      t->args = {*a, *b};
      return TypeExprPtr(t);
    }
    return a;
  }

  std::optional<TypeExprPtr> tuple_type() {
    auto a = atom_type();
    if (!a) return std::nullopt;
    if (!at(Tok::star)) return a;
    std::vector<TypeExprPtr> items{*a};
    while (at(Tok::star)) {
      eat();
      auto b = atom_type();
      if (!b) return std::nullopt;
      items.push_back(*b);
    }
    auto t = std::make_shared<TypeExpr>();
    t->kind = TypeExpr::Kind::tuple;
    t->args = std::move(items);
    return TypeExprPtr(t);
  }

  std::optional<TypeExprPtr> atom_type() {
    auto t = std::make_shared<TypeExpr>();
    if (at(Tok::lparen)) {
      eat();
      auto inner = type_expr();
      if (!inner) return std::nullopt;
      if (!expect(Tok::rparen, "')'")) return std::nullopt;
      return inner;
    }
    if (!at(Tok::ident)) {
      error(peek().pos, "expected a type");
      return std::nullopt;
    }
    Pos p = peek().pos;
    std::string w = eat().text;
    if (w == "int") t->kind = TypeExpr::Kind::int_;
    else if (w == "bool") t->kind = TypeExpr::Kind::bool_;
    else if (w == "string") t->kind = TypeExpr::Kind::string_;
    else if (w == "version") t->kind = TypeExpr::Kind::version;
    else if (w == "pkgname") t->kind = TypeExpr::Kind::pkgname;
    else if (w == "formula") t->kind = TypeExpr::Kind::formula;
    else if (w == "unit") t->kind = TypeExpr::Kind::unit;
    else if (w == "package") t->kind = TypeExpr::Kind::package;
    else if (w == "request") t->kind = TypeExpr::Kind::request;
    else if (w == "list") {
      t->kind = TypeExpr::Kind::list;
      auto inner = atom_type();
      if (!inner) return std::nullopt;
      t->args = {*inner};
    } else if (w == "enum") {
      t->kind = TypeExpr::Kind::enum_;
      if (!expect(Tok::lparen, "'(' after enum")) return std::nullopt;
      for (;;) {
        if (!at(Tok::ident)) {
          error(peek().pos, "expected an enum label");
          return std::nullopt;
        }
        t->enum_labels.push_back(eat().text);
        if (at(Tok::comma)) {
          eat();
          continue;
        }
        break;
      }
      if (!expect(Tok::rparen, "')'")) return std::nullopt;
    } else {
      error(p, "unknown type '" + w + "'");
      return std::nullopt;
    }
    return TypeExprPtr(t);
  }
};

}  // namespace

Result<MoomlProgram> parse_program(std::string_view text) {
  std::vector<ParseDiagnostic> diags;
  Lexer lexer(text, diags);
  auto toks = lexer.run();
  if (lexer.failed()) return Result<MoomlProgram>::failure(std::move(diags));
  Parser parser(std::move(toks), diags);
  auto prog = parser.program();
  if (!prog) return Result<MoomlProgram>::failure(std::move(diags));
  return Result<MoomlProgram>{std::move(prog), std::move(diags)};
}

Result<ExprPtr> parse_expr_text(std::string_view text) {
  std::vector<ParseDiagnostic> diags;
  Lexer lexer(text, diags);
  auto toks = lexer.run();
  if (lexer.failed()) return Result<ExprPtr>::failure(std::move(diags));
  Parser parser(std::move(toks), diags);
  auto e = parser.single_expr();
  if (!e) return Result<ExprPtr>::failure(std::move(diags));
  return Result<ExprPtr>{std::move(e), std::move(diags)};
}

}  // namespace mooml
