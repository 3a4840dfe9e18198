#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

#include "cudfmoo/mooml_eval.hpp"

namespace mooml {

namespace {

struct EvalException {
  ExecError error;
};

[[noreturn]] void raise(ExecError::Kind kind, std::string message,
                        Pos pos = {}) {
  throw EvalException{ExecError{kind, std::move(message), pos}};
}

std::shared_ptr<Value> mutv(Value::Kind k) {
  auto v = std::make_shared<Value>();
  v->kind = k;
  return v;
}

EnvPtr push_env(EnvPtr env, std::string name, ValuePtr value) {
  auto node = std::make_shared<EnvNode>();
  node->name = std::move(name);
  node->value = std::move(value);
  node->next = std::move(env);
  return node;
}

const ValuePtr* lookup_env(const EnvPtr& env, const std::string& name) {
  for (const EnvNode* n = env.get(); n; n = n->next.get())
    if (n->name == name) return &n->value;
  return nullptr;
}

int primitive_arity(const std::string& name) {
  static const std::map<std::string, int> table = {
      {"fold", 3},   {"map", 2},    {"filter", 2},      {"length", 1},
      {"sum", 1},    {"max", 1},    {"min", 1},         {"forall", 2},
      {"exists", 2}, {"cardinality", 2},                {"add", 2},
      {"sub", 2},    {"eq", 2},     {"neq", 2},         {"lt", 2},
      {"leq", 2},    {"gt", 2},     {"geq", 2},         {"and", 2},
      {"or", 2},     {"not", 1},
  };
  auto it = table.find(name);
  return it == table.end() ? -1 : it->second;
}

class Evaluator {
 public:
  Evaluator(std::uint64_t max_steps) : max_steps_(max_steps) {}

  std::uint64_t steps() const { return steps_; }

  ValuePtr eval(const EnvPtr& env, const ExprPtr& e) {
    tick(e->pos);
    switch (e->kind) {
      case Expr::Kind::var: {
        const ValuePtr* v = lookup_env(env, e->name);
        if (!v)
          raise(ExecError::Kind::division_or_domain,
                "unbound identifier '" + e->name + "'", e->pos);
        return *v;
      }
      case Expr::Kind::lit:
        return literal_value(e->lit);
      case Expr::Kind::unit:
        return make_unit_value();
      case Expr::Kind::lambda: {
        auto v = mutv(Value::Kind::closure);
        v->text = e->name;
        v->body = e->items[0];
        v->env = env;
        return v;
      }
      case Expr::Kind::app: {
        ValuePtr fn = eval(env, e->items[0]);
        ValuePtr arg = eval(env, e->items[1]);
        return apply(fn, arg, e->pos);
      }
      case Expr::Kind::tuple: {
        auto v = mutv(Value::Kind::tuple);
        for (const auto& item : e->items) v->items.push_back(eval(env, item));
        return v;
      }
      case Expr::Kind::record: {
        auto v = mutv(Value::Kind::record);
        for (const auto& [l, fe] : e->fields)
          v->fields.emplace_back(l, eval(env, fe));
        return v;
      }
      case Expr::Kind::empty_list:
        return make_list({});
      case Expr::Kind::cons: {
        ValuePtr head = eval(env, e->items[0]);
        ValuePtr tail = eval(env, e->items[1]);
        if (tail->kind != Value::Kind::list)
          raise(ExecError::Kind::division_or_domain,
                "cons onto a non-list", e->pos);
        auto v = mutv(Value::Kind::list);
        v->items.reserve(tail->items.size() + 1);
        v->items.push_back(std::move(head));
        v->items.insert(v->items.end(), tail->items.begin(),
                        tail->items.end());
        return v;
      }
      case Expr::Kind::proj: {
        ValuePtr rec = eval(env, e->items[0]);
        if (rec->kind != Value::Kind::record)
          raise(ExecError::Kind::missing_field,
                "projection from a non-record", e->pos);
        for (const auto& [l, fv] : rec->fields)
          if (l == e->name) return fv;
        raise(ExecError::Kind::missing_field, "missing field " + e->name,
              e->pos);
      }
      case Expr::Kind::let: {
        ValuePtr value = eval(env, e->items[0]);
        EnvPtr extended = env;
        if (!match_pattern(e->pattern, value, &extended))
          raise(ExecError::Kind::match_failure,
                "let pattern did not match", e->pos);
        return eval(extended, e->items[1]);
      }
      case Expr::Kind::match: {
        ValuePtr scrut = eval(env, e->items[0]);
        for (const auto& arm : e->arms) {
          EnvPtr extended = env;
          if (match_pattern(arm.pattern, scrut, &extended))
            return eval(extended, arm.body);
        }
        raise(ExecError::Kind::match_failure, "no match arm applies",
              e->pos);
      }
      case Expr::Kind::ascribe:
        return eval(env, e->items[0]);
    }
    raise(ExecError::Kind::division_or_domain, "unreachable expression");
  }

  ValuePtr apply(const ValuePtr& fn, const ValuePtr& arg, Pos pos) {
    tick(pos);
    if (fn->kind == Value::Kind::closure) {
      EnvPtr extended = push_env(fn->env, fn->text, arg);
      return eval(extended, fn->body);
    }
    if (fn->kind == Value::Kind::primitive) {
      auto v = mutv(Value::Kind::primitive);
      v->text = fn->text;
      v->items = fn->items;
      v->items.push_back(arg);
      int arity = primitive_arity(fn->text);
      if (static_cast<int>(v->items.size()) < arity) return v;
      return exec_primitive(v->text, v->items, pos);
    }
    raise(ExecError::Kind::division_or_domain,
          "application of a non-function", pos);
  }

 private:
  std::uint64_t steps_ = 0;
  std::uint64_t max_steps_;

  void tick(Pos pos) {
    if (++steps_ > max_steps_)
      raise(ExecError::Kind::division_or_domain,
            "evaluation step budget exceeded", pos);
  }

  static ValuePtr literal_value(const Literal& lit) {
    switch (lit.v.index()) {
      case 0: return make_int(std::get<std::int64_t>(lit.v));
      case 1: return make_bool(std::get<bool>(lit.v));
      case 2: return make_string(std::get<std::string>(lit.v));
      default: return make_enum(std::get<EnumLit>(lit.v).label);
    }
  }

  bool match_pattern(const PatternPtr& p, const ValuePtr& v, EnvPtr* env) {
    switch (p->kind) {
      case Pattern::Kind::wildcard:
        return true;
      case Pattern::Kind::var:
        *env = push_env(*env, p->name, v);
        return true;
      case Pattern::Kind::lit: {
        ValuePtr lv = literal_value(p->lit);
        auto eqr = value_equal(lv, v);
        if (auto* err = std::get_if<ExecError>(&eqr)) throw EvalException{*err};
        return std::get<bool>(eqr);
      }
      case Pattern::Kind::unit:
        return v->kind == Value::Kind::unit;
      case Pattern::Kind::tuple: {
        if (v->kind != Value::Kind::tuple ||
            v->items.size() != p->items.size())
          return false;
        for (size_t i = 0; i < p->items.size(); ++i)
          if (!match_pattern(p->items[i], v->items[i], env)) return false;
        return true;
      }
      case Pattern::Kind::record: {
        if (v->kind != Value::Kind::record) return false;
        for (const auto& [l, fp] : p->fields) {
          const ValuePtr* fv = nullptr;
          for (const auto& [vl, vv] : v->fields)
            if (vl == l) fv = &vv;
          if (!fv)
            raise(ExecError::Kind::missing_field, "missing field " + l,
                  p->pos);
          if (!match_pattern(fp, *fv, env)) return false;
        }
        return true;
      }
      case Pattern::Kind::empty_list:
        return v->kind == Value::Kind::list && v->items.empty();
      case Pattern::Kind::cons: {
        if (v->kind != Value::Kind::list || v->items.empty()) return false;
        if (!match_pattern(p->items[0], v->items[0], env)) return false;
        auto tail = mutv(Value::Kind::list);
        tail->items.assign(v->items.begin() + 1, v->items.end());
        return match_pattern(p->items[1], tail, env);
      }
    }
    return false;
  }

  static std::int64_t int_arg(const ValuePtr& v, const char* what, Pos pos) {
    if (v->kind != Value::Kind::int_)
      raise(ExecError::Kind::division_or_domain,
            std::string(what) + " expects integers", pos);
    return v->int_value;
  }

  static bool bool_arg(const ValuePtr& v, const char* what, Pos pos) {
    if (v->kind != Value::Kind::bool_)
      raise(ExecError::Kind::division_or_domain,
            std::string(what) + " expects booleans", pos);
    return v->bool_value;
  }

  static const std::vector<ValuePtr>& list_arg(const ValuePtr& v,
                                               const char* what, Pos pos) {
    if (v->kind != Value::Kind::list)
      raise(ExecError::Kind::division_or_domain,
            std::string(what) + " expects a list", pos);
    return v->items;
  }

  bool truth(const ValuePtr& fn, const ValuePtr& x, const char* what,
             Pos pos) {
    ValuePtr r = apply(fn, x, pos);
    return bool_arg(r, what, pos);
  }

  static int order_compare(const ValuePtr& a, const ValuePtr& b, Pos pos) {
    if (a->kind == Value::Kind::int_ && b->kind == Value::Kind::int_)
      return a->int_value < b->int_value ? -1
             : a->int_value > b->int_value ? 1 : 0;
    if (a->kind == Value::Kind::version && b->kind == Value::Kind::version)
      return a->version.value < b->version.value ? -1
             : a->version.value > b->version.value ? 1 : 0;
    raise(ExecError::Kind::division_or_domain,
          "ordering comparison requires two ints or two versions", pos);
  }

  ValuePtr exec_primitive(const std::string& name,
                          const std::vector<ValuePtr>& args, Pos pos) {
    if (name == "fold") {
      const auto& items = list_arg(args[1], "fold", pos);
      ValuePtr acc = args[2];
      for (auto it = items.rbegin(); it != items.rend(); ++it)
        acc = apply(apply(args[0], *it, pos), acc, pos);
      return acc;
    }
    if (name == "map") {
      auto out = mutv(Value::Kind::list);
      for (const auto& x : list_arg(args[1], "map", pos))
        out->items.push_back(apply(args[0], x, pos));
      return out;
    }
    if (name == "filter") {
      auto out = mutv(Value::Kind::list);
      for (const auto& x : list_arg(args[1], "filter", pos))
        if (truth(args[0], x, "filter", pos)) out->items.push_back(x);
      return out;
    }
    if (name == "length")
      return make_int(static_cast<std::int64_t>(
          list_arg(args[0], "length", pos).size()));
    if (name == "sum") {
      std::int64_t total = 0;
      for (const auto& x : list_arg(args[0], "sum", pos)) {
        if (__builtin_add_overflow(total, int_arg(x, "sum", pos), &total))
          raise(ExecError::Kind::division_or_domain, "sum overflow", pos);
      }
      return make_int(total);
    }
    if (name == "max" || name == "min") {
      const auto& items = list_arg(args[0], name.c_str(), pos);
      if (items.empty())
        raise(ExecError::Kind::empty_list_argument, name + " of an empty list",
              pos);
      std::int64_t best = int_arg(items[0], name.c_str(), pos);
      for (size_t i = 1; i < items.size(); ++i) {
        std::int64_t x = int_arg(items[i], name.c_str(), pos);
        if (name == "max" ? x > best : x < best) best = x;
      }
      return make_int(best);
    }
    if (name == "forall" || name == "exists" || name == "cardinality") {
      std::int64_t count = 0;
      const auto& items = list_arg(args[1], name.c_str(), pos);
      for (const auto& x : items)
        if (truth(args[0], x, name.c_str(), pos)) ++count;
      if (name == "forall")
        return make_bool(count == static_cast<std::int64_t>(items.size()));
      if (name == "exists") return make_bool(count > 0);
      return make_int(count);
    }
    if (name == "add" || name == "sub") {
      std::int64_t a = int_arg(args[0], name.c_str(), pos);
      std::int64_t b = int_arg(args[1], name.c_str(), pos);
      std::int64_t r = 0;
      bool overflow = name == "add" ? __builtin_add_overflow(a, b, &r)
                                    : __builtin_sub_overflow(a, b, &r);
      if (overflow)
        raise(ExecError::Kind::division_or_domain, "integer overflow", pos);
      return make_int(r);
    }
    if (name == "eq" || name == "neq") {
      auto eqr = value_equal(args[0], args[1]);
      if (auto* err = std::get_if<ExecError>(&eqr)) {
        ExecError e = *err;
        e.pos = pos;
        throw EvalException{e};
      }
      bool eq = std::get<bool>(eqr);
      return make_bool(name == "eq" ? eq : !eq);
    }
    if (name == "lt" || name == "leq" || name == "gt" || name == "geq") {
      int c = order_compare(args[0], args[1], pos);
      bool r = name == "lt"    ? c < 0
               : name == "leq" ? c <= 0
               : name == "gt"  ? c > 0
                               : c >= 0;
      return make_bool(r);
    }
    if (name == "and")
      return make_bool(bool_arg(args[0], "and", pos) &&
                       bool_arg(args[1], "and", pos));
    if (name == "or")
      return make_bool(bool_arg(args[0], "or", pos) ||
                       bool_arg(args[1], "or", pos));
    if (name == "not") return make_bool(!bool_arg(args[0], "not", pos));
    raise(ExecError::Kind::division_or_domain, "unknown primitive " + name,
          pos);
  }
};

cudf::VpkgFormula vpkglist_formula(const std::vector<cudf::VPkg>& list) {
  cudf::VpkgFormula f;
  for (const auto& v : list) f.clauses.push_back({v});
  return f;
}

cudf::VpkgFormula provides_formula(
    const std::vector<cudf::ProvidedFeature>& provides) {
  cudf::VpkgFormula f;
  for (const auto& p : provides) {
    cudf::VPkg v;
    v.name = p.name;
    if (p.version)
      v.constraint = {cudf::ConstraintOp::eq, *p.version};
    f.clauses.push_back({v});
  }
  return f;
}

const char* keep_label(cudf::Keep k) {
  switch (k) {
    case cudf::Keep::none: return "none";
    case cudf::Keep::version: return "version";
    case cudf::Keep::package: return "package";
    case cudf::Keep::feature: return "feature";
  }
  return "none";
}

ValuePtr property_value(const cudf::PropertyValue& pv) {
  switch (pv.kind()) {
    case cudf::PropertyKind::integer:
      return make_int(std::get<std::int64_t>(pv.v));
    case cudf::PropertyKind::boolean:
      return make_bool(std::get<bool>(pv.v));
    case cudf::PropertyKind::string:
      return make_string(std::get<std::string>(pv.v));
    case cudf::PropertyKind::enumeration:
      return make_enum(std::get<cudf::EnumValue>(pv.v).label);
    case cudf::PropertyKind::pkgname:
      return make_pkgname(std::get<cudf::PkgName>(pv.v).value);
    case cudf::PropertyKind::vpkglist:
      return make_formula(
          vpkglist_formula(std::get<std::vector<cudf::VPkg>>(pv.v)));
    case cudf::PropertyKind::vpkgformula:
      return make_formula(std::get<cudf::VpkgFormula>(pv.v));
  }
  return make_unit_value();
}

ValuePtr zero_property_value(const cudf::PropertyType& pt) {
  switch (pt.kind) {
    case cudf::PropertyKind::integer: return make_int(0);
    case cudf::PropertyKind::boolean: return make_bool(false);
    case cudf::PropertyKind::string: return make_string("");
    case cudf::PropertyKind::enumeration:
      return make_enum(pt.enum_labels.empty() ? "" : pt.enum_labels.front());
    case cudf::PropertyKind::pkgname: return make_pkgname("");
    case cudf::PropertyKind::vpkglist: return make_formula({});
    case cudf::PropertyKind::vpkgformula: return make_formula({});
  }
  return make_unit_value();
}

ValuePtr package_record(const cudf::CudfDoc& doc,
                        const cudf::PackageDesc& pkg,
                        const cudf::Solution& proposed) {
  auto rec = mutv(Value::Kind::record);
  rec->fields.emplace_back("name", make_pkgname(pkg.name.value));
  rec->fields.emplace_back("version", make_version(pkg.version));
  rec->fields.emplace_back("depends", make_formula(pkg.depends));
  rec->fields.emplace_back("conflicts",
                           make_formula(vpkglist_formula(pkg.conflicts)));
  rec->fields.emplace_back("provides",
                           make_formula(provides_formula(pkg.provides)));
  rec->fields.emplace_back("keep", make_enum(keep_label(pkg.keep)));
  rec->fields.emplace_back("was-installed", make_bool(pkg.installed));
  rec->fields.emplace_back("is-installed",
                           make_bool(proposed.contains(pkg.ref())));
  if (doc.preamble) {
    for (const auto& [name, pt] : doc.preamble->declarations) {
      const cudf::PropertyValue* pv = pkg.find_extra(name);
      if (pv)
        rec->fields.emplace_back(name, property_value(*pv));
      else if (pt.default_value)
        rec->fields.emplace_back(name, property_value(*pt.default_value));
      else
        rec->fields.emplace_back(name, zero_property_value(pt));
    }
  }
  return rec;
}

ValuePtr request_record(const cudf::Request& req) {
  auto rec = mutv(Value::Kind::record);
  rec->fields.emplace_back("install",
                           make_formula(vpkglist_formula(req.install)));
  rec->fields.emplace_back("remove",
                           make_formula(vpkglist_formula(req.remove)));
  rec->fields.emplace_back("upgrade",
                           make_formula(vpkglist_formula(req.upgrade)));
  return rec;
}

}  // namespace

ValuePtr make_int(std::int64_t v) {
  auto x = mutv(Value::Kind::int_);
  x->int_value = v;
  return x;
}
ValuePtr make_bool(bool v) {
  auto x = mutv(Value::Kind::bool_);
  x->bool_value = v;
  return x;
}
ValuePtr make_string(std::string s) {
  auto x = mutv(Value::Kind::string_);
  x->text = std::move(s);
  return x;
}
ValuePtr make_enum(std::string label) {
  auto x = mutv(Value::Kind::enum_);
  x->text = std::move(label);
  return x;
}
ValuePtr make_version(cudf::Version v) {
  auto x = mutv(Value::Kind::version);
  x->version = v;
  return x;
}
ValuePtr make_pkgname(std::string name) {
  auto x = mutv(Value::Kind::pkgname);
  x->text = std::move(name);
  return x;
}
ValuePtr make_formula(cudf::VpkgFormula f) {
  auto x = mutv(Value::Kind::formula);
  x->formula = std::move(f);
  return x;
}
ValuePtr make_unit_value() { return mutv(Value::Kind::unit); }
ValuePtr make_list(std::vector<ValuePtr> items) {
  auto x = mutv(Value::Kind::list);
  x->items = std::move(items);
  return x;
}

std::string ExecError::to_string() const {
  const char* k = "division-or-domain";
  switch (kind) {
    case Kind::match_failure: k = "match-failure"; break;
    case Kind::empty_list_argument: k = "empty-list-argument"; break;
    case Kind::division_or_domain: k = "division-or-domain"; break;
    case Kind::missing_field: k = "missing-field"; break;
  }
  std::ostringstream os;
  os << k << ": " << message;
  if (pos.line > 0) os << " at line " << pos.line << ", column " << pos.column;
  return os.str();
}

std::variant<bool, ExecError> value_equal(const ValuePtr& a,
                                          const ValuePtr& b) {
  if (a->kind == Value::Kind::closure || a->kind == Value::Kind::primitive ||
      b->kind == Value::Kind::closure || b->kind == Value::Kind::primitive)
    return ExecError{ExecError::Kind::division_or_domain,
                     "cannot compare functions", {}};
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Value::Kind::int_: return a->int_value == b->int_value;
    case Value::Kind::bool_: return a->bool_value == b->bool_value;
    case Value::Kind::string_:
    case Value::Kind::enum_:
    case Value::Kind::pkgname: return a->text == b->text;
    case Value::Kind::version: return a->version == b->version;
    case Value::Kind::formula: return a->formula == b->formula;
    case Value::Kind::unit: return true;
    case Value::Kind::tuple:
    case Value::Kind::list: {
      if (a->items.size() != b->items.size()) return false;
      for (size_t i = 0; i < a->items.size(); ++i) {
        auto r = value_equal(a->items[i], b->items[i]);
        if (std::holds_alternative<ExecError>(r)) return r;
        if (!std::get<bool>(r)) return false;
      }
      return true;
    }
    case Value::Kind::record: {
      // Field order is a construction detail; compare as label -> value maps.
      auto sorted = [](const Value& v) {
        std::vector<std::pair<std::string, ValuePtr>> fs = v.fields;
        std::sort(fs.begin(), fs.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        return fs;
      };
      auto fa = sorted(*a), fb = sorted(*b);
      if (fa.size() != fb.size()) return false;
      for (size_t i = 0; i < fa.size(); ++i) {
        if (fa[i].first != fb[i].first) return false;
        auto r = value_equal(fa[i].second, fb[i].second);
        if (std::holds_alternative<ExecError>(r)) return r;
        if (!std::get<bool>(r)) return false;
      }
      return true;
    }
    default: return false;
  }
}

std::string value_to_string(const ValuePtr& v) {
  std::ostringstream os;
  switch (v->kind) {
    case Value::Kind::int_: os << v->int_value; break;
    case Value::Kind::bool_: os << (v->bool_value ? "true" : "false"); break;
    case Value::Kind::string_: {
      os << '"';
      for (char c : v->text) {
        if (c == '"') os << "\\\"";
        else if (c == '\\') os << "\\\\";
        else if (c == '\n') os << "\\n";
        else os << c;
      }
      os << '"';
      break;
    }
    case Value::Kind::enum_: os << '\'' << v->text; break;
    case Value::Kind::version: os << v->version.value; break;
    case Value::Kind::pkgname: os << v->text; break;
    case Value::Kind::formula: os << cudf::to_string(v->formula); break;
    case Value::Kind::unit: os << "()"; break;
    case Value::Kind::tuple: {
      os << '(';
      for (size_t i = 0; i < v->items.size(); ++i) {
        if (i) os << ", ";
        os << value_to_string(v->items[i]);
      }
      os << ')';
      break;
    }
    case Value::Kind::list: {
      os << '[';
      for (size_t i = 0; i < v->items.size(); ++i) {
        if (i) os << "; ";
        os << value_to_string(v->items[i]);
      }
      os << ']';
      break;
    }
    case Value::Kind::record: {
      os << '{';
      for (size_t i = 0; i < v->fields.size(); ++i) {
        if (i) os << ", ";
        os << v->fields[i].first << " = " << value_to_string(v->fields[i].second);
      }
      os << '}';
      break;
    }
    case Value::Kind::closure: os << "<fun>"; break;
    case Value::Kind::primitive: os << '<' << v->text << '>'; break;
  }
  return os.str();
}

Comparison compare_outcomes(const Outcome& a, const Outcome& b) {
  if (a.measures.size() != b.measures.size())
    throw std::invalid_argument("outcome measure shapes differ");
  for (size_t i = 0; i < a.measures.size(); ++i)
    if (a.measures[i].first != b.measures[i].first)
      throw std::invalid_argument("outcome polarities differ");
  if (a.constraint_holds != b.constraint_holds)
    return a.constraint_holds ? Comparison::a_better : Comparison::b_better;
  if (!a.constraint_holds) return Comparison::incomparable;
  for (size_t i = 0; i < a.measures.size(); ++i) {
    auto [pol, av] = a.measures[i];
    std::int64_t bv = b.measures[i].second;
    if (av == bv) continue;
    bool a_wins = pol == Polarity::minimize ? av < bv : av > bv;
    return a_wins ? Comparison::a_better : Comparison::b_better;
  }
  return Comparison::equal;
}

EvalEnv build_env(const cudf::CudfDoc& doc, const cudf::Solution& proposed) {
  EvalEnv out;
  EnvPtr env;
  for (const auto& name : stdlib_names()) {
    auto prim = mutv(Value::Kind::primitive);
    prim->text = name;
    env = push_env(env, name, std::move(prim));
  }
  for (const auto& pkg : doc.universe)
    out.package_records.push_back(package_record(doc, pkg, proposed));
  env = push_env(env, "u", make_list(out.package_records));
  out.request_record = request_record(doc.request);
  env = push_env(env, "r", out.request_record);
  out.bindings = env;
  return out;
}

std::variant<ValuePtr, ExecError> eval_expr(const EvalEnv& env,
                                            const ExprPtr& e,
                                            std::uint64_t* steps,
                                            std::uint64_t max_steps) {
  Evaluator ev(max_steps);
  try {
    ValuePtr v = ev.eval(env.bindings, e);
    if (steps) *steps += ev.steps();
    return v;
  } catch (const EvalException& ex) {
    if (steps) *steps += ev.steps();
    return ex.error;
  }
}

std::variant<ValuePtr, ExecError> apply_value(const ValuePtr& fn,
                                              const ValuePtr& arg,
                                              std::uint64_t* steps,
                                              std::uint64_t max_steps) {
  Evaluator ev(max_steps);
  try {
    ValuePtr v = ev.apply(fn, arg, Pos{});
    if (steps) *steps += ev.steps();
    return v;
  } catch (const EvalException& ex) {
    if (steps) *steps += ev.steps();
    return ex.error;
  }
}

std::variant<Outcome, ExecError> eval_program(const cudf::CudfDoc& doc,
                                              const cudf::Solution& proposed,
                                              const MoomlProgram& prog,
                                              std::uint64_t* steps,
                                              std::uint64_t max_steps) {
  Evaluator ev(max_steps);
  try {
    EvalEnv base = build_env(doc, proposed);
    EnvPtr env = base.bindings;
    for (const auto& def : prog.definitions)
      env = push_env(env, def.name, ev.eval(env, def.body));
    Outcome out;
    if (prog.constraint) {
      ValuePtr c = ev.eval(env, *prog.constraint);
      if (c->kind != Value::Kind::bool_)
        raise(ExecError::Kind::division_or_domain,
              "constraint did not evaluate to a boolean",
              (*prog.constraint)->pos);
      out.constraint_holds = c->bool_value;
    }
    for (const auto& crit : prog.criteria) {
      ValuePtr m = ev.eval(env, crit.expr);
      if (m->kind != Value::Kind::int_)
        raise(ExecError::Kind::division_or_domain,
              "criterion did not evaluate to an integer", crit.expr->pos);
      out.measures.emplace_back(crit.polarity, m->int_value);
    }
    if (steps) *steps += ev.steps();
    return out;
  } catch (const EvalException& ex) {
    if (steps) *steps += ev.steps();
    return ex.error;
  }
}

}  // namespace mooml
