#include <algorithm>
#include <sstream>

#include "cudfmoo/mooml_types.hpp"

namespace mooml {

TypePtr resolve(const TypePtr& t) {
  TypePtr cur = t;
  while (cur->link) cur = cur->link;
  return cur;
}

namespace {

using Severity = ParseDiagnostic::Severity;
using cudf::PropertyKind;

struct TypeErrorException {
  Pos pos;
  std::string message;
};

TypePtr mk(Type::Kind k) {
  auto t = std::make_shared<Type>();
  t->kind = k;
  return t;
}

TypePtr mk_list(TypePtr elem) {
  auto t = mk(Type::Kind::list);
  t->args = {std::move(elem)};
  return t;
}

TypePtr mk_arrow(TypePtr a, TypePtr b) {
  auto t = mk(Type::Kind::arrow);
  t->args = {std::move(a), std::move(b)};
  return t;
}

TypePtr mk_package(TypePtr safety) {
  auto t = mk(Type::Kind::package);
  t->args = {std::move(safety)};
  return t;
}

TypePtr mk_closed_enum(std::set<std::string> labels) {
  auto t = mk(Type::Kind::enum_);
  t->labels = std::move(labels);
  t->open = false;
  return t;
}

// The field schema of the two nominal record types.
struct RecordSchemas {
  std::map<std::string, TypePtr> package_fields;  // safety-independent part
  std::map<std::string, TypePtr> request_fields;
};

TypePtr property_kind_type(const cudf::PropertyType& pt) {
  switch (pt.kind) {
    case PropertyKind::integer: return mk(Type::Kind::int_);
    case PropertyKind::boolean: return mk(Type::Kind::bool_);
    case PropertyKind::string: return mk(Type::Kind::string_);
    case PropertyKind::enumeration:
      return mk_closed_enum(
          {pt.enum_labels.begin(), pt.enum_labels.end()});
    case PropertyKind::pkgname: return mk(Type::Kind::pkgname);
    case PropertyKind::vpkglist: return mk(Type::Kind::formula);
    case PropertyKind::vpkgformula: return mk(Type::Kind::formula);
  }
  return mk(Type::Kind::unit);
}

RecordSchemas build_schemas(const cudf::Preamble* preamble) {
  RecordSchemas s;
  auto& pf = s.package_fields;
  pf["name"] = mk(Type::Kind::pkgname);
  pf["version"] = mk(Type::Kind::version);
  pf["depends"] = mk(Type::Kind::formula);
  pf["conflicts"] = mk(Type::Kind::formula);
  pf["provides"] = mk(Type::Kind::formula);
  pf["keep"] = mk_closed_enum({"none", "version", "package", "feature"});
  pf["was-installed"] = mk(Type::Kind::bool_);
  pf["is-installed"] = mk(Type::Kind::bool_);
  if (preamble) {
    for (const auto& [name, pt] : preamble->declarations)
      pf[name] = property_kind_type(pt);
  }
  s.request_fields["install"] = mk(Type::Kind::formula);
  s.request_fields["remove"] = mk(Type::Kind::formula);
  s.request_fields["upgrade"] = mk(Type::Kind::formula);
  return s;
}

std::vector<std::pair<std::string, Scheme>> build_stdlib(int* next_id) {
  std::vector<std::pair<std::string, Scheme>> env;
  auto var = [&] {
    auto t = mk(Type::Kind::var);
    t->id = (*next_id)++;
    return t;
  };
  auto b_ = [] { return mk(Type::Kind::bool_); };
  auto i_ = [] { return mk(Type::Kind::int_); };
  auto poly = [](std::initializer_list<TypePtr> vars, TypePtr body) {
    Scheme s;
    for (const auto& v : vars) s.quantified.push_back(v->id);
    s.body = std::move(body);
    return s;
  };
  auto mono = [](TypePtr t) { return Scheme{{}, std::move(t)}; };
  {
    TypePtr a = var(), b = var();
    env.emplace_back("fold",
                     poly({a, b}, mk_arrow(mk_arrow(a, mk_arrow(b, b)),
                                           mk_arrow(mk_list(a),
                                                    mk_arrow(b, b)))));
  }
  {
    TypePtr a = var(), b = var();
    env.emplace_back("map", poly({a, b}, mk_arrow(mk_arrow(a, b),
                                                  mk_arrow(mk_list(a),
                                                           mk_list(b)))));
  }
  {
    TypePtr a = var();
    env.emplace_back("filter", poly({a}, mk_arrow(mk_arrow(a, b_()),
                                                  mk_arrow(mk_list(a),
                                                           mk_list(a)))));
  }
  {
    TypePtr a = var();
    env.emplace_back("length", poly({a}, mk_arrow(mk_list(a), i_())));
  }
  env.emplace_back("sum", mono(mk_arrow(mk_list(i_()), i_())));
  env.emplace_back("max", mono(mk_arrow(mk_list(i_()), i_())));
  env.emplace_back("min", mono(mk_arrow(mk_list(i_()), i_())));
  for (const char* name : {"forall", "exists"}) {
    TypePtr a = var();
    env.emplace_back(name, poly({a}, mk_arrow(mk_arrow(a, b_()),
                                              mk_arrow(mk_list(a), b_()))));
  }
  {
    TypePtr a = var();
    env.emplace_back("cardinality",
                     poly({a}, mk_arrow(mk_arrow(a, b_()),
                                        mk_arrow(mk_list(a), i_()))));
  }
  env.emplace_back("add", mono(mk_arrow(i_(), mk_arrow(i_(), i_()))));
  env.emplace_back("sub", mono(mk_arrow(i_(), mk_arrow(i_(), i_()))));
  for (const char* name : {"eq", "neq", "lt", "leq", "gt", "geq"}) {
    TypePtr a = var();
    env.emplace_back(name, poly({a}, mk_arrow(a, mk_arrow(a, b_()))));
  }
  env.emplace_back("and", mono(mk_arrow(b_(), mk_arrow(b_(), b_()))));
  env.emplace_back("or", mono(mk_arrow(b_(), mk_arrow(b_(), b_()))));
  env.emplace_back("not", mono(mk_arrow(b_(), b_())));
  return env;
}

class Infer {
 public:
  Infer(const cudf::Preamble* preamble, bool safe_premise)
      : schemas_(build_schemas(preamble)), safe_(safe_premise) {
    bind_stdlib();
    TypePtr u_safety = safe_ ? mk(Type::Kind::safe_) : mk(Type::Kind::unsafe_);
    push("u", mono(mk_list(mk_package(std::move(u_safety)))));
    push("r", mono(mk(Type::Kind::request)));
  }

  TypedProgram run_program(const MoomlProgram& prog) {
    TypedProgram out;
    for (const auto& def : prog.definitions) {
      TypePtr t = infer(def.body);
      out.definition_schemes.push_back(generalize(t));
      push(def.name, out.definition_schemes.back());
    }
    if (prog.constraint) {
      TypePtr t = infer(*prog.constraint);
      unify(t, mk(Type::Kind::bool_), (*prog.constraint)->pos,
            "the constraint must be a boolean");
    }
    for (const auto& crit : prog.criteria) {
      TypePtr t = infer(crit.expr);
      unify(t, mk(Type::Kind::int_), crit.expr->pos,
            "a criterion must be an integer measure");
    }
    finish_comparisons();
    out.node_types = std::move(node_types_);
    return out;
  }

  TypedExpr run_expr(const ExprPtr& e) {
    TypedExpr out;
    TypePtr t = infer(e);
    finish_comparisons();
    out.scheme = generalize(t);
    out.node_types = std::move(node_types_);
    return out;
  }

 private:
  RecordSchemas schemas_;
  bool safe_;
  std::vector<std::pair<std::string, Scheme>> env_;
  std::map<const Expr*, TypePtr> node_types_;
  std::vector<TypePtr> comparison_uses_;
  int next_id_ = 1;

  [[noreturn]] void fail(Pos pos, const std::string& msg) {
    throw TypeErrorException{pos, msg};
  }

  TypePtr fresh_var() {
    auto t = mk(Type::Kind::var);
    t->id = next_id_++;
    return t;
  }

  TypePtr fresh_safety() {
    // In plain mode nothing distinguishes records, so use the constant.
    if (!safe_) return mk(Type::Kind::unsafe_);
    auto t = mk(Type::Kind::var);
    t->id = next_id_++;
    return t;
  }

  TypePtr open_enum(std::set<std::string> labels) {
    auto t = mk(Type::Kind::enum_);
    t->labels = std::move(labels);
    t->open = true;
    t->id = next_id_++;
    return t;
  }

  static Scheme mono(TypePtr t) { return Scheme{{}, std::move(t)}; }

  void push(const std::string& name, Scheme s) {
    env_.emplace_back(name, std::move(s));
  }
  void pop(size_t n) { env_.resize(env_.size() - n); }

  const Scheme* lookup(const std::string& name) const {
    for (auto it = env_.rbegin(); it != env_.rend(); ++it)
      if (it->first == name) return &it->second;
    return nullptr;
  }

  void bind_stdlib() {
    for (auto& entry : build_stdlib(&next_id_))
      push(entry.first, std::move(entry.second));
  }

  // -- unification -----------------------------------------------------------

  bool occurs(int id, const TypePtr& t0) {
    TypePtr t = resolve(t0);
    if (t->kind == Type::Kind::var) return t->id == id;
    for (const auto& arg : t->args)
      if (occurs(id, arg)) return true;
    return false;
  }

  // Forces every package record reachable in t to be unsafe; propagates the
  // comparison taint to still-unknown variables.
  void taint(const TypePtr& t0, Pos pos) {
    TypePtr t = resolve(t0);
    switch (t->kind) {
      case Type::Kind::var:
        t->cmp_tainted = true;
        return;
      case Type::Kind::package:
        unify(t->args[0], mk(Type::Kind::unsafe_), pos,
              "a package record flowing into a comparison depends on "
              "is-installed");
        return;
      case Type::Kind::tuple:
      case Type::Kind::list:
        for (const auto& arg : t->args) taint(arg, pos);
        return;
      default:
        return;
    }
  }

  void bind_var(const TypePtr& v, const TypePtr& t, Pos pos) {
    if (occurs(v->id, t))
      fail(pos, "cannot construct the infinite type " + print_type(v) +
                    " = " + print_type(t));
    if (v->cmp_tainted && safe_) taint(t, pos);
    v->link = t;
  }

  void unify(const TypePtr& a0, const TypePtr& b0, Pos pos,
             const std::string& context) {
    TypePtr a = resolve(a0);
    TypePtr b = resolve(b0);
    if (a == b) return;
    if (a->kind == Type::Kind::var) {
      bind_var(a, b, pos);
      return;
    }
    if (b->kind == Type::Kind::var) {
      bind_var(b, a, pos);
      return;
    }
    if (a->kind == Type::Kind::enum_ && b->kind == Type::Kind::enum_) {
      unify_enums(a, b, pos, context);
      return;
    }
    if (a->kind != b->kind || a->args.size() != b->args.size()) {
      fail(pos, "type mismatch: " + print_type(a) + " vs " + print_type(b) +
                    (context.empty() ? "" : " (" + context + ")"));
    }
    for (size_t i = 0; i < a->args.size(); ++i)
      unify(a->args[i], b->args[i], pos, context);
  }

  void unify_enums(const TypePtr& a, const TypePtr& b, Pos pos,
                   const std::string& context) {
    auto subset = [](const std::set<std::string>& x,
                     const std::set<std::string>& y) {
      return std::includes(y.begin(), y.end(), x.begin(), x.end());
    };
    if (a->open && b->open) {
      auto merged = open_enum(a->labels);
      merged->labels.insert(b->labels.begin(), b->labels.end());
      a->link = merged;
      b->link = merged;
      return;
    }
    if (a->open || b->open) {
      const TypePtr& open = a->open ? a : b;
      const TypePtr& closed = a->open ? b : a;
      if (!subset(open->labels, closed->labels))
        fail(pos, "enumeration label not among " + print_type(closed) +
                      (context.empty() ? "" : " (" + context + ")"));
      open->link = closed;
      return;
    }
    if (a->labels != b->labels)
      fail(pos, "mismatched enumerations " + print_type(a) + " vs " +
                    print_type(b));
  }

  // -- schemes ---------------------------------------------------------------

  void collect_ids(const TypePtr& t0, std::set<int>* out) {
    TypePtr t = resolve(t0);
    if (t->kind == Type::Kind::var || (t->kind == Type::Kind::enum_ && t->open))
      out->insert(t->id);
    for (const auto& arg : t->args) collect_ids(arg, out);
  }

  std::set<int> env_free_ids() {
    std::set<int> out;
    for (const auto& [name, scheme] : env_) {
      std::set<int> ids;
      collect_ids(scheme.body, &ids);
      for (int id : ids)
        if (std::find(scheme.quantified.begin(), scheme.quantified.end(),
                      id) == scheme.quantified.end())
          out.insert(id);
    }
    return out;
  }

  Scheme generalize(const TypePtr& t) {
    std::set<int> in_env = env_free_ids();
    std::set<int> ids;
    collect_ids(t, &ids);
    Scheme s;
    s.body = t;
    for (int id : ids)
      if (!in_env.count(id)) s.quantified.push_back(id);
    return s;
  }

  TypePtr instantiate_rec(const TypePtr& t0, const std::set<int>& quant,
                          std::map<int, TypePtr>* fresh) {
    TypePtr t = resolve(t0);
    if (t->kind == Type::Kind::var) {
      if (!quant.count(t->id)) return t;
      auto it = fresh->find(t->id);
      if (it != fresh->end()) return it->second;
      TypePtr v = fresh_var();
      v->cmp_tainted = t->cmp_tainted;
      (*fresh)[t->id] = v;
      return v;
    }
    if (t->kind == Type::Kind::enum_ && t->open) {
      if (!quant.count(t->id)) return t;
      auto it = fresh->find(t->id);
      if (it != fresh->end()) return it->second;
      TypePtr v = open_enum(t->labels);
      (*fresh)[t->id] = v;
      return v;
    }
    if (t->args.empty()) return t;
    auto copy = std::make_shared<Type>(*t);
    copy->link = nullptr;
    for (auto& arg : copy->args) arg = instantiate_rec(arg, quant, fresh);
    return copy;
  }

  TypePtr instantiate(const Scheme& s) {
    std::set<int> quant(s.quantified.begin(), s.quantified.end());
    std::map<int, TypePtr> fresh;
    return instantiate_rec(s.body, quant, &fresh);
  }

  // After the whole run, packages that flowed into eq/neq/lt/leq/gt/geq
  // must be unsafe: their comparison reads every field.
  void finish_comparisons() {
    if (!safe_) return;
    for (const auto& t : comparison_uses_) taint(t, Pos{});
  }

  // -- record label resolution -----------------------------------------------

  enum class Owner { package_rec, request_rec, ambiguous, unknown };

  Owner label_owner(const std::string& label) const {
    bool p = schemas_.package_fields.count(label) > 0;
    bool r = schemas_.request_fields.count(label) > 0;
    if (p && r) return Owner::ambiguous;
    if (p) return Owner::package_rec;
    if (r) return Owner::request_rec;
    return Owner::unknown;
  }

  // Copies closed enums so shared schema nodes are never linked by
  // unification; other schema types are immutable leaves.
  TypePtr field_type(const TypePtr& schema_type) {
    if (schema_type->kind == Type::Kind::enum_)
      return mk_closed_enum(schema_type->labels);
    return schema_type;
  }

  // -- inference -------------------------------------------------------------

  TypePtr annotate(const Expr* node, TypePtr t) {
    node_types_[node] = t;
    return t;
  }

  TypePtr infer(const ExprPtr& e) { return annotate(e.get(), infer_raw(e)); }

  TypePtr infer_raw(const ExprPtr& e) {
    switch (e->kind) {
      case Expr::Kind::var: {
        const Scheme* s = lookup(e->name);
        if (!s) fail(e->pos, "unbound identifier '" + e->name + "'");
        TypePtr t = instantiate(*s);
        if (safe_ && (e->name == "eq" || e->name == "neq" || e->name == "lt" ||
                      e->name == "leq" || e->name == "gt" ||
                      e->name == "geq")) {
          TypePtr rt = resolve(t);
          if (rt->kind == Type::Kind::arrow) {
            TypePtr dom = resolve(rt->args[0]);
            if (dom->kind == Type::Kind::var) dom->cmp_tainted = true;
            comparison_uses_.push_back(rt->args[0]);
          }
        }
        return t;
      }
      case Expr::Kind::lit:
        return literal_type(e->lit);
      case Expr::Kind::unit:
        return mk(Type::Kind::unit);
      case Expr::Kind::lambda: {
        TypePtr param = fresh_var();
        push(e->name, mono(param));
        TypePtr body = infer(e->items[0]);
        pop(1);
        return mk_arrow(param, body);
      }
      case Expr::Kind::app: {
        TypePtr fn = infer(e->items[0]);
        TypePtr arg = infer(e->items[1]);
        TypePtr res = fresh_var();
        unify(fn, mk_arrow(arg, res), e->pos, "in this application");
        return res;
      }
      case Expr::Kind::tuple: {
        auto t = mk(Type::Kind::tuple);
        for (const auto& item : e->items) t->args.push_back(infer(item));
        return t;
      }
      case Expr::Kind::record:
        return infer_record(e);
      case Expr::Kind::empty_list:
        return mk_list(fresh_var());
      case Expr::Kind::cons: {
        TypePtr head = infer(e->items[0]);
        TypePtr tail = infer(e->items[1]);
        unify(tail, mk_list(head), e->pos, "list element mismatch");
        return resolve(tail);
      }
      case Expr::Kind::proj:
        return infer_proj(e);
      case Expr::Kind::let: {
        TypePtr value = infer(e->items[0]);
        size_t pushed = 0;
        if (e->pattern->kind == Pattern::Kind::var) {
          push(e->pattern->name, generalize(value));
          pushed = 1;
        } else {
          pushed = bind_pattern(e->pattern, value);
        }
        TypePtr body = infer(e->items[1]);
        pop(pushed);
        return body;
      }
      case Expr::Kind::match: {
        TypePtr scrut = infer(e->items[0]);
        TypePtr result = fresh_var();
        for (const auto& arm : e->arms) {
          size_t pushed = bind_pattern(arm.pattern, scrut);
          TypePtr body = infer(arm.body);
          unify(body, result, arm.body->pos, "match arms must agree");
          pop(pushed);
        }
        return resolve(result);
      }
      case Expr::Kind::ascribe: {
        TypePtr inner = infer(e->items[0]);
        TypePtr want = from_type_expr(e->ascription, e->pos);
        unify(inner, want, e->pos, "ascription mismatch");
        return resolve(want);
      }
    }
    fail(e->pos, "unreachable expression kind");
  }

  TypePtr literal_type(const Literal& lit) {
    switch (lit.v.index()) {
      case 0: return mk(Type::Kind::int_);
      case 1: return mk(Type::Kind::bool_);
      case 2: return mk(Type::Kind::string_);
      default:
        return open_enum({std::get<EnumLit>(lit.v).label});
    }
  }

  TypePtr infer_record(const ExprPtr& e) {
    std::set<std::string> labels;
    for (const auto& [l, unused] : e->fields) labels.insert(l);
    auto exact = [&](const std::map<std::string, TypePtr>& schema) {
      if (labels.size() != schema.size()) return false;
      for (const auto& [l, unused] : schema)
        if (!labels.count(l)) return false;
      return true;
    };
    if (exact(schemas_.request_fields)) {
      for (const auto& [l, fe] : e->fields)
        unify(infer(fe), field_type(schemas_.request_fields.at(l)), fe->pos,
              "request field " + l);
      return mk(Type::Kind::request);
    }
    if (exact(schemas_.package_fields)) {
      for (const auto& [l, fe] : e->fields)
        unify(infer(fe), field_type(schemas_.package_fields.at(l)), fe->pos,
              "package field " + l);
      return mk_package(fresh_safety());
    }
    fail(e->pos,
         "record literal matches neither the package nor the request schema");
  }

  TypePtr infer_proj(const ExprPtr& e) {
    TypePtr rec = infer(e->items[0]);
    const std::string& label = e->name;
    Owner owner = label_owner(label);
    if (owner == Owner::ambiguous) {
      TypePtr r = resolve(rec);
      if (r->kind == Type::Kind::package) owner = Owner::package_rec;
      else if (r->kind == Type::Kind::request) owner = Owner::request_rec;
      else
        fail(e->pos, "ambiguous record label '" + label +
                         "'; add a type ascription such as (e : package)");
    }
    switch (owner) {
      case Owner::package_rec: {
        TypePtr safety = label == "is-installed" ? mk(Type::Kind::unsafe_)
                                                 : fresh_safety();
        unify(rec, mk_package(std::move(safety)), e->pos,
              "projection of " + label);
        return field_type(schemas_.package_fields.at(label));
      }
      case Owner::request_rec:
        unify(rec, mk(Type::Kind::request), e->pos, "projection of " + label);
        return field_type(schemas_.request_fields.at(label));
      default:
        fail(e->pos, "unknown label " + label);
    }
  }

  // Binds pattern variables monomorphically; returns how many were pushed.
  size_t bind_pattern(const PatternPtr& p, const TypePtr& scrut) {
    switch (p->kind) {
      case Pattern::Kind::wildcard:
        return 0;
      case Pattern::Kind::var:
        push(p->name, mono(scrut));
        return 1;
      case Pattern::Kind::lit:
        unify(scrut, literal_type(p->lit), p->pos, "pattern literal");
        return 0;
      case Pattern::Kind::unit:
        unify(scrut, mk(Type::Kind::unit), p->pos, "unit pattern");
        return 0;
      case Pattern::Kind::empty_list:
        unify(scrut, mk_list(fresh_var()), p->pos, "list pattern");
        return 0;
      case Pattern::Kind::cons: {
        TypePtr elem = fresh_var();
        unify(scrut, mk_list(elem), p->pos, "list pattern");
        size_t n = bind_pattern(p->items[0], elem);
        n += bind_pattern(p->items[1], resolve(scrut));
        return n;
      }
      case Pattern::Kind::tuple: {
        auto t = mk(Type::Kind::tuple);
        for (size_t i = 0; i < p->items.size(); ++i)
          t->args.push_back(fresh_var());
        unify(scrut, t, p->pos, "tuple pattern");
        size_t n = 0;
        for (size_t i = 0; i < p->items.size(); ++i)
          n += bind_pattern(p->items[i], t->args[i]);
        return n;
      }
      case Pattern::Kind::record: {
        bool all_pkg = true, all_req = true;
        for (const auto& [l, unused] : p->fields) {
          if (!schemas_.package_fields.count(l)) all_pkg = false;
          if (!schemas_.request_fields.count(l)) all_req = false;
        }
        Owner owner;
        TypePtr r = resolve(scrut);
        if (r->kind == Type::Kind::package) owner = Owner::package_rec;
        else if (r->kind == Type::Kind::request) owner = Owner::request_rec;
        else if (all_pkg && !all_req) owner = Owner::package_rec;
        else if (all_req && !all_pkg) owner = Owner::request_rec;
        else if (all_pkg && all_req)
          fail(p->pos, "ambiguous record pattern; ascribe the scrutinee");
        else
          fail(p->pos, "record pattern matches neither package nor request");
        size_t n = 0;
        if (owner == Owner::package_rec) {
          bool reads_installed = false;
          for (const auto& [l, unused] : p->fields)
            if (l == "is-installed") reads_installed = true;
          TypePtr safety = reads_installed ? mk(Type::Kind::unsafe_)
                                           : fresh_safety();
          unify(scrut, mk_package(std::move(safety)), p->pos,
                "record pattern");
          for (const auto& [l, fp] : p->fields)
            n += bind_pattern(fp, field_type(schemas_.package_fields.at(l)));
        } else {
          unify(scrut, mk(Type::Kind::request), p->pos, "record pattern");
          for (const auto& [l, fp] : p->fields)
            n += bind_pattern(fp, field_type(schemas_.request_fields.at(l)));
        }
        return n;
      }
    }
    return 0;
  }

  TypePtr from_type_expr(const TypeExprPtr& te, Pos pos) {
    switch (te->kind) {
      case TypeExpr::Kind::int_: return mk(Type::Kind::int_);
      case TypeExpr::Kind::bool_: return mk(Type::Kind::bool_);
      case TypeExpr::Kind::string_: return mk(Type::Kind::string_);
      case TypeExpr::Kind::version: return mk(Type::Kind::version);
      case TypeExpr::Kind::pkgname: return mk(Type::Kind::pkgname);
      case TypeExpr::Kind::formula: return mk(Type::Kind::formula);
      case TypeExpr::Kind::unit: return mk(Type::Kind::unit);
      case TypeExpr::Kind::package: return mk_package(fresh_safety());
      case TypeExpr::Kind::request: return mk(Type::Kind::request);
      case TypeExpr::Kind::enum_:
        return mk_closed_enum(
            {te->enum_labels.begin(), te->enum_labels.end()});
      case TypeExpr::Kind::list:
        return mk_list(from_type_expr(te->args[0], pos));
      case TypeExpr::Kind::tuple: {
        auto t = mk(Type::Kind::tuple);
        for (const auto& arg : te->args)
          t->args.push_back(from_type_expr(arg, pos));
        return t;
      }
      case TypeExpr::Kind::arrow:
        return mk_arrow(from_type_expr(te->args[0], pos),
                        from_type_expr(te->args[1], pos));
    }
    fail(pos, "unreachable type expression");
  }
};

template <class T, class Fn>
Result<T> run_infer(Fn&& fn) {
  try {
    return Result<T>::success(fn());
  } catch (const TypeErrorException& err) {
    std::vector<ParseDiagnostic> diags;
    diags.push_back(ParseDiagnostic{err.pos.line, err.pos.column, err.message,
                                    Severity::error});
    return Result<T>::failure(std::move(diags));
  }
}

void print_type_rec(std::ostringstream& os, const TypePtr& t0,
                    std::map<int, std::string>* names, int min_level) {
  // 0 = arrow, 1 = tuple, 2 = atom (mirrors the ascription grammar).
  TypePtr t = resolve(t0);
  switch (t->kind) {
    case Type::Kind::var: {
      auto it = names->find(t->id);
      if (it == names->end()) {
        size_t n = names->size();
        std::string name(1, static_cast<char>('a' + n % 26));
        if (n >= 26) name += std::to_string(n / 26);
        it = names->emplace(t->id, std::move(name)).first;
      }
      os << it->second;
      return;
    }
    case Type::Kind::int_: os << "int"; return;
    case Type::Kind::bool_: os << "bool"; return;
    case Type::Kind::string_: os << "string"; return;
    case Type::Kind::version: os << "version"; return;
    case Type::Kind::pkgname: os << "pkgname"; return;
    case Type::Kind::formula: os << "formula"; return;
    case Type::Kind::unit: os << "unit"; return;
    case Type::Kind::request: os << "request"; return;
    case Type::Kind::safe_: os << "safe"; return;
    case Type::Kind::unsafe_: os << "unsafe"; return;
    case Type::Kind::package: {
      TypePtr s = resolve(t->args[0]);
      if (s->kind == Type::Kind::safe_) os << "safe-package";
      else os << "package";
      return;
    }
    case Type::Kind::enum_: {
      os << "enum(";
      bool first = true;
      for (const auto& l : t->labels) {
        if (!first) os << ", ";
        first = false;
        os << l;
      }
      os << ')';
      return;
    }
    case Type::Kind::list:
      os << "list ";
      print_type_rec(os, t->args[0], names, 2);
      return;
    case Type::Kind::tuple: {
      if (min_level > 1) os << '(';
      for (size_t i = 0; i < t->args.size(); ++i) {
        if (i) os << " * ";
        print_type_rec(os, t->args[i], names, 2);
      }
      if (min_level > 1) os << ')';
      return;
    }
    case Type::Kind::arrow: {
      if (min_level > 0) os << '(';
      print_type_rec(os, t->args[0], names, 1);
      os << " -> ";
      print_type_rec(os, t->args[1], names, 0);
      if (min_level > 0) os << ')';
      return;
    }
  }
}

}  // namespace

Result<TypedProgram> infer_program(const MoomlProgram& prog,
                                   const cudf::Preamble* preamble) {
  return run_infer<TypedProgram>([&] {
    Infer engine(preamble, /*safe_premise=*/false);
    return engine.run_program(prog);
  });
}

Result<TypedExpr> infer_expr(const ExprPtr& e, const cudf::Preamble* preamble,
                             bool safe_premise) {
  return run_infer<TypedExpr>([&] {
    Infer engine(preamble, safe_premise);
    return engine.run_expr(e);
  });
}

Result<Locality> classify_locality(const ExprPtr& e,
                                   const cudf::Preamble* preamble) {
  auto plain = infer_expr(e, preamble, /*safe_premise=*/false);
  if (!plain.ok()) return Result<Locality>::failure(plain.diagnostics);
  TypePtr t = resolve(plain->scheme.body);
  if (t->kind != Type::Kind::arrow ||
      resolve(t->args[0])->kind != Type::Kind::package) {
    std::vector<ParseDiagnostic> diags;
    diags.push_back(ParseDiagnostic{
        e->pos.line, e->pos.column,
        "locality requires an expression of type package -> t, found " +
            print_type(t),
        ParseDiagnostic::Severity::error});
    return Result<Locality>::failure(std::move(diags));
  }
  auto safe = infer_expr(e, preamble, /*safe_premise=*/true);
  if (!safe.ok()) return Result<Locality>::success(Locality::non_local);
  TypePtr st = resolve(safe->scheme.body);
  if (st->kind != Type::Kind::arrow)
    return Result<Locality>::success(Locality::non_local);
  TypePtr arg = resolve(st->args[0]);
  if (arg->kind != Type::Kind::package)
    return Result<Locality>::success(Locality::non_local);
  TypePtr safety = resolve(arg->args[0]);
  if (safety->kind == Type::Kind::unsafe_)
    return Result<Locality>::success(Locality::local_b);
  return Result<Locality>::success(Locality::local_a);
}

std::string print_type(const TypePtr& t) {
  std::ostringstream os;
  std::map<int, std::string> names;
  print_type_rec(os, t, &names, 0);
  return os.str();
}

std::vector<std::pair<std::string, Scheme>> stdlib_env() {
  int next_id = 1;
  return build_stdlib(&next_id);
}

std::string print_scheme(const Scheme& s) {
  // Alpha-normalize by traversal order; quantified vars named first.
  std::ostringstream body;
  std::map<int, std::string> names;
  print_type_rec(body, s.body, &names, 0);
  std::vector<std::string> quantified_names;
  for (int id : s.quantified) {
    auto it = names.find(id);
    if (it != names.end()) quantified_names.push_back(it->second);
  }
  std::sort(quantified_names.begin(), quantified_names.end());
  if (quantified_names.empty()) return body.str();
  std::ostringstream os;
  os << "forall";
  for (const auto& name : quantified_names) os << ' ' << name;
  os << ". " << body.str();
  return os.str();
}

}  // namespace mooml
