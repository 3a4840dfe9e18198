#include "cudfmoo/mooml_ast.hpp"

#include <algorithm>

namespace mooml {

bool equal(const TypeExprPtr& a, const TypeExprPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  if (a->enum_labels != b->enum_labels) return false;
  if (a->args.size() != b->args.size()) return false;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (!equal(a->args[i], b->args[i])) return false;
  return true;
}

bool equal(const PatternPtr& a, const PatternPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Pattern::Kind::wildcard:
    case Pattern::Kind::unit:
    case Pattern::Kind::empty_list:
      return true;
    case Pattern::Kind::var:
      return a->name == b->name;
    case Pattern::Kind::lit:
      return a->lit == b->lit;
    case Pattern::Kind::tuple:
    case Pattern::Kind::cons: {
      if (a->items.size() != b->items.size()) return false;
      for (size_t i = 0; i < a->items.size(); ++i)
        if (!equal(a->items[i], b->items[i])) return false;
      return true;
    }
    case Pattern::Kind::record: {
      if (a->fields.size() != b->fields.size()) return false;
      for (size_t i = 0; i < a->fields.size(); ++i) {
        if (a->fields[i].first != b->fields[i].first) return false;
        if (!equal(a->fields[i].second, b->fields[i].second)) return false;
      }
      return true;
    }
  }
  return false;
}

void pattern_vars(const PatternPtr& p, std::vector<std::string>& out) {
  if (!p) return;
  switch (p->kind) {
    case Pattern::Kind::var:
      out.push_back(p->name);
      break;
    case Pattern::Kind::tuple:
    case Pattern::Kind::cons:
      for (const auto& q : p->items) pattern_vars(q, out);
      break;
    case Pattern::Kind::record:
      for (const auto& [l, q] : p->fields) pattern_vars(q, out);
      break;
    default:
      break;
  }
}

namespace {

std::shared_ptr<Expr> blank(Expr::Kind k, Pos pos) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->pos = pos;
  return e;
}

}  // namespace

ExprPtr make_var(std::string name, Pos pos) {
  auto e = blank(Expr::Kind::var, pos);
  e->name = std::move(name);
  return e;
}

ExprPtr make_lit(Literal lit, Pos pos) {
  auto e = blank(Expr::Kind::lit, pos);
  e->lit = std::move(lit);
  return e;
}

ExprPtr make_unit(Pos pos) { return blank(Expr::Kind::unit, pos); }

ExprPtr make_lambda(std::string param, ExprPtr body, Pos pos) {
  auto e = blank(Expr::Kind::lambda, pos);
  e->name = std::move(param);
  e->items = {std::move(body)};
  return e;
}

ExprPtr make_app(ExprPtr fn, ExprPtr arg, Pos pos) {
  auto e = blank(Expr::Kind::app, pos);
  e->items = {std::move(fn), std::move(arg)};
  return e;
}

ExprPtr make_tuple(std::vector<ExprPtr> items, Pos pos) {
  auto e = blank(Expr::Kind::tuple, pos);
  e->items = std::move(items);
  return e;
}

ExprPtr make_record(std::vector<std::pair<std::string, ExprPtr>> fields,
                    Pos pos) {
  auto e = blank(Expr::Kind::record, pos);
  e->fields = std::move(fields);
  return e;
}

ExprPtr make_empty_list(Pos pos) { return blank(Expr::Kind::empty_list, pos); }

ExprPtr make_cons(ExprPtr head, ExprPtr tail, Pos pos) {
  auto e = blank(Expr::Kind::cons, pos);
  e->items = {std::move(head), std::move(tail)};
  return e;
}

ExprPtr make_proj(ExprPtr expr, std::string label, Pos pos) {
  auto e = blank(Expr::Kind::proj, pos);
  e->name = std::move(label);
  e->items = {std::move(expr)};
  return e;
}

ExprPtr make_let(PatternPtr pattern, ExprPtr value, ExprPtr body, Pos pos) {
  auto e = blank(Expr::Kind::let, pos);
  e->pattern = std::move(pattern);
  e->items = {std::move(value), std::move(body)};
  return e;
}

ExprPtr make_match(ExprPtr scrutinee, std::vector<MatchArm> arms, Pos pos) {
  auto e = blank(Expr::Kind::match, pos);
  e->items = {std::move(scrutinee)};
  e->arms = std::move(arms);
  return e;
}

ExprPtr make_ascribe(ExprPtr expr, TypeExprPtr ty, Pos pos) {
  auto e = blank(Expr::Kind::ascribe, pos);
  e->items = {std::move(expr)};
  e->ascription = std::move(ty);
  return e;
}

ExprPtr make_if(ExprPtr cond, ExprPtr then_e, ExprPtr else_e, Pos pos) {
  auto tpat = std::make_shared<Pattern>();
  tpat->kind = Pattern::Kind::lit;
  tpat->lit = Literal{true};
  auto fpat = std::make_shared<Pattern>();
  fpat->kind = Pattern::Kind::lit;
  fpat->lit = Literal{false};
  std::vector<MatchArm> arms;
  arms.push_back(MatchArm{tpat, std::move(then_e)});
  arms.push_back(MatchArm{fpat, std::move(else_e)});
  return make_match(std::move(cond), std::move(arms), pos);
}

bool is_if(const Expr& e) {
  if (e.kind != Expr::Kind::match || e.arms.size() != 2) return false;
  const auto& t = e.arms[0].pattern;
  const auto& f = e.arms[1].pattern;
  return t && f && t->kind == Pattern::Kind::lit &&
         f->kind == Pattern::Kind::lit && t->lit == Literal{true} &&
         f->lit == Literal{false};
}

bool equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Expr::Kind::var:
    case Expr::Kind::lambda:
    case Expr::Kind::proj:
      if (a->name != b->name) return false;
      break;
    case Expr::Kind::lit:
      if (!(a->lit == b->lit)) return false;
      break;
    case Expr::Kind::ascribe:
      if (!equal(a->ascription, b->ascription)) return false;
      break;
    case Expr::Kind::let:
      if (!equal(a->pattern, b->pattern)) return false;
      break;
    case Expr::Kind::match: {
      if (a->arms.size() != b->arms.size()) return false;
      for (size_t i = 0; i < a->arms.size(); ++i) {
        if (!equal(a->arms[i].pattern, b->arms[i].pattern)) return false;
        if (!equal(a->arms[i].body, b->arms[i].body)) return false;
      }
      break;
    }
    case Expr::Kind::record: {
      if (a->fields.size() != b->fields.size()) return false;
      for (size_t i = 0; i < a->fields.size(); ++i) {
        if (a->fields[i].first != b->fields[i].first) return false;
        if (!equal(a->fields[i].second, b->fields[i].second)) return false;
      }
      break;
    }
    default:
      break;
  }
  if (a->items.size() != b->items.size()) return false;
  for (size_t i = 0; i < a->items.size(); ++i)
    if (!equal(a->items[i], b->items[i])) return false;
  return true;
}

namespace {

void free_vars_rec(const ExprPtr& e, std::set<std::string>& bound,
                   std::set<std::string>& out) {
  if (!e) return;
  switch (e->kind) {
    case Expr::Kind::var:
      if (!bound.count(e->name)) out.insert(e->name);
      return;
    case Expr::Kind::lambda: {
      bool was = bound.count(e->name) > 0;
      bound.insert(e->name);
      free_vars_rec(e->items[0], bound, out);
      if (!was) bound.erase(e->name);
      return;
    }
    case Expr::Kind::let: {
      free_vars_rec(e->items[0], bound, out);
      std::vector<std::string> vars;
      pattern_vars(e->pattern, vars);
      std::vector<std::string> added;
      for (const auto& v : vars)
        if (bound.insert(v).second) added.push_back(v);
      free_vars_rec(e->items[1], bound, out);
      for (const auto& v : added) bound.erase(v);
      return;
    }
    case Expr::Kind::match: {
      free_vars_rec(e->items[0], bound, out);
      for (const auto& arm : e->arms) {
        std::vector<std::string> vars;
        pattern_vars(arm.pattern, vars);
        std::vector<std::string> added;
        for (const auto& v : vars)
          if (bound.insert(v).second) added.push_back(v);
        free_vars_rec(arm.body, bound, out);
        for (const auto& v : added) bound.erase(v);
      }
      return;
    }
    case Expr::Kind::record:
      for (const auto& [l, f] : e->fields) free_vars_rec(f, bound, out);
      return;
    default:
      for (const auto& i : e->items) free_vars_rec(i, bound, out);
      return;
  }
}

std::string fresh_name(const std::string& base,
                       const std::set<std::string>& avoid) {
  for (int i = 1;; ++i) {
    std::string cand = base + "-" + std::to_string(i);
    if (!avoid.count(cand)) return cand;
  }
}

PatternPtr rename_in_pattern(const PatternPtr& p, const std::string& from,
                             const std::string& to) {
  if (!p) return p;
  auto q = std::make_shared<Pattern>(*p);
  if (p->kind == Pattern::Kind::var && p->name == from) {
    q->name = to;
    return q;
  }
  for (auto& item : q->items) item = rename_in_pattern(item, from, to);
  for (auto& [l, f] : q->fields) f = rename_in_pattern(f, from, to);
  return q;
}

ExprPtr subst_rec(const ExprPtr& e, std::map<std::string, ExprPtr> subst) {
  if (!e || subst.empty()) return e;
  switch (e->kind) {
    case Expr::Kind::var: {
      auto it = subst.find(e->name);
      return it != subst.end() ? it->second : e;
    }
    case Expr::Kind::lambda: {
      auto inner = subst;
      inner.erase(e->name);
      std::set<std::string> captured;
      for (const auto& [k, v] : inner)
        for (const auto& fv : free_vars(v)) captured.insert(fv);
      std::string param = e->name;
      ExprPtr body = e->items[0];
      if (captured.count(param)) {
        std::set<std::string> avoid = captured;
        for (const auto& fv : free_vars(body)) avoid.insert(fv);
        std::string renamed = fresh_name(param, avoid);
        body = subst_rec(body, {{param, make_var(renamed, e->pos)}});
        param = renamed;
      }
      return make_lambda(param, subst_rec(body, inner), e->pos);
    }
    case Expr::Kind::let: {
      ExprPtr value = subst_rec(e->items[0], subst);
      std::vector<std::string> vars;
      pattern_vars(e->pattern, vars);
      auto inner = subst;
      for (const auto& v : vars) inner.erase(v);
      std::set<std::string> captured;
      for (const auto& [k, v] : inner)
        for (const auto& fv : free_vars(v)) captured.insert(fv);
      for (const auto& v : vars) {
        if (captured.count(v)) {
          // Renaming pattern binders in place is intricate; instead rebuild
          // the let through a lambda-style rename of the whole body.
          std::set<std::string> avoid = captured;
          for (const auto& fv : free_vars(e->items[1])) avoid.insert(fv);
          for (const auto& w : vars) avoid.insert(w);
          std::string renamed = fresh_name(v, avoid);
          auto body = subst_rec(e->items[1], {{v, make_var(renamed, e->pos)}});
          auto pat = rename_in_pattern(e->pattern, v, renamed);
          auto fixed = make_let(pat, e->items[0], body, e->pos);
          return subst_rec(fixed, subst);
        }
      }
      return make_let(e->pattern, value, subst_rec(e->items[1], inner),
                      e->pos);
    }
    case Expr::Kind::match: {
      ExprPtr scrut = subst_rec(e->items[0], subst);
      std::vector<MatchArm> arms;
      for (const auto& arm : e->arms) {
        std::vector<std::string> vars;
        pattern_vars(arm.pattern, vars);
        auto inner = subst;
        for (const auto& v : vars) inner.erase(v);
        std::set<std::string> captured;
        for (const auto& [k, v] : inner)
          for (const auto& fv : free_vars(v)) captured.insert(fv);
        PatternPtr pat = arm.pattern;
        ExprPtr body = arm.body;
        for (const auto& v : vars) {
          if (captured.count(v)) {
            std::set<std::string> avoid = captured;
            for (const auto& fv : free_vars(body)) avoid.insert(fv);
            for (const auto& w : vars) avoid.insert(w);
            std::string renamed = fresh_name(v, avoid);
            body = subst_rec(body, {{v, make_var(renamed, e->pos)}});
            pat = rename_in_pattern(pat, v, renamed);
          }
        }
        arms.push_back(MatchArm{pat, subst_rec(body, inner)});
      }
      return make_match(scrut, std::move(arms), e->pos);
    }
    case Expr::Kind::record: {
      std::vector<std::pair<std::string, ExprPtr>> fields;
      for (const auto& [l, f] : e->fields)
        fields.emplace_back(l, subst_rec(f, subst));
      return make_record(std::move(fields), e->pos);
    }
    case Expr::Kind::app:
      return make_app(subst_rec(e->items[0], subst),
                      subst_rec(e->items[1], subst), e->pos);
    case Expr::Kind::cons:
      return make_cons(subst_rec(e->items[0], subst),
                       subst_rec(e->items[1], subst), e->pos);
    case Expr::Kind::tuple: {
      std::vector<ExprPtr> items;
      for (const auto& i : e->items) items.push_back(subst_rec(i, subst));
      return make_tuple(std::move(items), e->pos);
    }
    case Expr::Kind::proj:
      return make_proj(subst_rec(e->items[0], subst), e->name, e->pos);
    case Expr::Kind::ascribe:
      return make_ascribe(subst_rec(e->items[0], subst), e->ascription,
                          e->pos);
    default:
      return e;
  }
}

}  // namespace

std::set<std::string> free_vars(const ExprPtr& e) {
  std::set<std::string> bound, out;
  free_vars_rec(e, bound, out);
  return out;
}

ExprPtr substitute(const ExprPtr& e,
                   const std::map<std::string, ExprPtr>& subst) {
  return subst_rec(e, subst);
}

std::size_t node_count(const ExprPtr& e) {
  if (!e) return 0;
  std::size_t n = 1;
  for (const auto& i : e->items) n += node_count(i);
  for (const auto& [l, f] : e->fields) n += node_count(f);
  for (const auto& arm : e->arms) n += node_count(arm.body);
  return n;
}

bool equal(const MoomlProgram& a, const MoomlProgram& b) {
  if (a.definitions.size() != b.definitions.size()) return false;
  for (size_t i = 0; i < a.definitions.size(); ++i) {
    if (a.definitions[i].name != b.definitions[i].name) return false;
    if (!equal(a.definitions[i].body, b.definitions[i].body)) return false;
  }
  if (a.constraint.has_value() != b.constraint.has_value()) return false;
  if (a.constraint && !equal(*a.constraint, *b.constraint)) return false;
  if (a.criteria.size() != b.criteria.size()) return false;
  for (size_t i = 0; i < a.criteria.size(); ++i) {
    if (a.criteria[i].polarity != b.criteria[i].polarity) return false;
    if (!equal(a.criteria[i].expr, b.criteria[i].expr)) return false;
  }
  return true;
}

std::size_t node_count(const MoomlProgram& p) {
  std::size_t n = 0;
  for (const auto& d : p.definitions) n += node_count(d.body);
  if (p.constraint) n += node_count(*p.constraint);
  for (const auto& c : p.criteria) n += node_count(c.expr);
  return n;
}

const std::vector<std::string>& stdlib_names() {
  static const std::vector<std::string> names = {
      "fold", "map",  "filter", "length", "sum",  "max", "min",
      "forall", "exists", "cardinality", "add", "sub", "eq",  "neq",
      "lt",   "leq",  "gt",     "geq",    "and", "or",  "not"};
  return names;
}

bool is_stdlib_name(const std::string& name) {
  const auto& ns = stdlib_names();
  return std::find(ns.begin(), ns.end(), name) != ns.end();
}

}  // namespace mooml
