#include <optional>
#include <set>
#include <utility>

#include "cudfmoo/mooml_partial.hpp"

#include "cudfmoo/mooml_eval.hpp"
#include "cudfmoo/mooml_types.hpp"

namespace mooml {

namespace {

// Fully inlined definition bodies, each with all earlier definitions
// substituted away.
std::map<std::string, ExprPtr> inlined_map(const MoomlProgram& prog) {
  std::map<std::string, ExprPtr> subst;
  for (const auto& def : prog.definitions)
    subst[def.name] = substitute(def.body, subst);
  return subst;
}

std::optional<cudf::PropertyType> materializable(const TypePtr& t0) {
  TypePtr t = resolve(t0);
  cudf::PropertyType pt;
  switch (t->kind) {
    case Type::Kind::int_:
      pt.kind = cudf::PropertyKind::integer;
      return pt;
    case Type::Kind::bool_:
      pt.kind = cudf::PropertyKind::boolean;
      return pt;
    case Type::Kind::string_:
      pt.kind = cudf::PropertyKind::string;
      return pt;
    case Type::Kind::pkgname:
      pt.kind = cudf::PropertyKind::pkgname;
      return pt;
    case Type::Kind::formula:
      pt.kind = cudf::PropertyKind::vpkgformula;
      return pt;
    case Type::Kind::enum_:
      if (t->labels.empty()) return std::nullopt;
      pt.kind = cudf::PropertyKind::enumeration;
      pt.enum_labels.assign(t->labels.begin(), t->labels.end());
      return pt;
    default:
      return std::nullopt;
  }
}

std::optional<cudf::PropertyValue> value_to_property(const ValuePtr& v) {
  switch (v->kind) {
    case Value::Kind::int_:
      return cudf::PropertyValue{v->int_value};
    case Value::Kind::bool_:
      return cudf::PropertyValue{v->bool_value};
    case Value::Kind::string_:
      return cudf::PropertyValue{v->text};
    case Value::Kind::enum_:
      return cudf::PropertyValue{cudf::EnumValue{v->text}};
    case Value::Kind::pkgname:
      return cudf::PropertyValue{cudf::PkgName{v->text}};
    case Value::Kind::formula:
      return cudf::PropertyValue{v->formula};
    default:
      return std::nullopt;
  }
}

ValuePtr with_installed(const ValuePtr& rec, bool b) {
  auto v = std::make_shared<Value>(*rec);
  for (auto& [label, fv] : v->fields)
    if (label == "is-installed") fv = make_bool(b);
  return v;
}

struct Plan {
  Locality locality = Locality::local_a;
  cudf::PropertyType prop_type;
  std::string param;
  std::vector<cudf::PropertyValue> values_a;     // local_a, per package
  std::vector<cudf::PropertyValue> values_inst;  // local_b
  std::vector<cudf::PropertyValue> values_not;   // local_b
};

class Engine {
 public:
  Engine(const cudf::CudfDoc& doc, const MoomlProgram& prog,
         const std::map<const Expr*, TypePtr>& node_types)
      : doc_(doc),
        preamble_(doc.preamble ? &*doc.preamble : nullptr),
        node_types_(node_types),
        inlined_(inlined_map(prog)),
        env0_(build_env(doc, cudf::Solution{})) {}

  PartialEvalResult run(const MoomlProgram& prog) {
    // Phase 1: plan rewrites of the constraint and criteria.
    if (prog.constraint) plan_expr(*prog.constraint);
    for (const auto& crit : prog.criteria) plan_expr(crit.expr);

    // Phase 2: definitions still referenced once the planned replacements
    // are in place stay untouched (modulo sound inner rewrites); the rest
    // are dead code and eligible for whole-definition materialization.
    std::set<std::string> live = live_definitions(prog);
    for (const auto& def : prog.definitions)
      if (live.count(def.name)) plan_expr(def.body);

    // Phase 3: allocate property names in document order and rebuild.
    PartialEvalResult out;
    for (const auto& def : prog.definitions) {
      if (!live.count(def.name)) {
        ExprPtr rewritten = try_whole_definition(def);
        out.program.definitions.push_back(
            {def.name, rewritten ? rewritten : def.body, def.pos});
      } else {
        out.program.definitions.push_back({def.name, rebuild(def.body), def.pos});
      }
    }
    if (prog.constraint) out.program.constraint = rebuild(*prog.constraint);
    for (const auto& crit : prog.criteria)
      out.program.criteria.push_back({crit.polarity, rebuild(crit.expr)});
    out.transformer = std::move(transformer_);
    return out;
  }

 private:
  const cudf::CudfDoc& doc_;
  const cudf::Preamble* preamble_;
  const std::map<const Expr*, TypePtr>& node_types_;
  std::map<std::string, ExprPtr> inlined_;
  EvalEnv env0_;
  std::map<const Expr*, Plan> plans_;
  Transformer transformer_;
  int next_fresh_ = 0;

  bool closed_over_scenario(const ExprPtr& e) const {
    for (const auto& name : free_vars(e))
      if (name != "u" && name != "r" && !is_stdlib_name(name)) return false;
    return true;
  }

  // Tests one node as a pre-computation candidate; on success the values
  // are already computed. Any failure (not package -> t, not local, result
  // type with no CUDF counterpart, runtime error) yields no plan.
  std::optional<Plan> candidate(const ExprPtr& e) {
    ExprPtr inl = substitute(e, inlined_);
    if (!closed_over_scenario(inl)) return std::nullopt;
    auto locality = classify_locality(inl, preamble_);
    if (!locality.ok() || *locality == Locality::non_local) return std::nullopt;
    auto typed = infer_expr(inl, preamble_);
    if (!typed.ok()) return std::nullopt;
    TypePtr body = resolve(typed->scheme.body);
    if (body->kind != Type::Kind::arrow) return std::nullopt;
    auto pt = materializable(body->args[1]);
    if (!pt) return std::nullopt;

    auto fn = eval_expr(env0_, inl);
    if (std::holds_alternative<ExecError>(fn)) return std::nullopt;

    Plan plan;
    plan.locality = *locality;
    plan.prop_type = *pt;
    plan.param = e->kind == Expr::Kind::lambda ? e->name : "p";
    for (const auto& rec : env0_.package_records) {
      if (plan.locality == Locality::local_a) {
        if (!append_value(std::get<ValuePtr>(fn), rec, &plan.values_a))
          return std::nullopt;
      } else {
        if (!append_value(std::get<ValuePtr>(fn), with_installed(rec, true),
                          &plan.values_inst))
          return std::nullopt;
        if (!append_value(std::get<ValuePtr>(fn), rec, &plan.values_not))
          return std::nullopt;
      }
    }
    return plan;
  }

  static bool append_value(const ValuePtr& fn, const ValuePtr& arg,
                           std::vector<cudf::PropertyValue>* out) {
    auto r = apply_value(fn, arg);
    if (std::holds_alternative<ExecError>(r)) return false;
    auto pv = value_to_property(std::get<ValuePtr>(r));
    if (!pv) return false;
    out->push_back(std::move(*pv));
    return true;
  }

  // Top-down, maximal-first: a planned node's interior is never revisited.
  void plan_expr(const ExprPtr& e) {
    if (auto plan = candidate(e)) {
      plans_.emplace(e.get(), std::move(*plan));
      return;
    }
    for (const auto& child : e->items) plan_expr(child);
    for (const auto& [label, fe] : e->fields) plan_expr(fe);
    for (const auto& arm : e->arms) plan_expr(arm.body);
  }

  // Identifiers that survive in an expression once planned nodes are
  // replaced (replacements reference only their parameter and properties).
  void surviving_names(const ExprPtr& e, std::set<std::string>* out) const {
    if (plans_.count(e.get())) return;
    if (e->kind == Expr::Kind::var) {
      out->insert(e->name);
      return;
    }
    for (const auto& child : e->items) surviving_names(child, out);
    for (const auto& [label, fe] : e->fields) surviving_names(fe, out);
    for (const auto& arm : e->arms) surviving_names(arm.body, out);
  }

  std::set<std::string> live_definitions(const MoomlProgram& prog) const {
    std::set<std::string> used;
    if (prog.constraint) surviving_names(*prog.constraint, &used);
    for (const auto& crit : prog.criteria) surviving_names(crit.expr, &used);
    // Close over references between (original) definition bodies.
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& def : prog.definitions) {
        if (!used.count(def.name)) continue;
        for (const auto& name : free_vars(def.body))
          if (used.insert(name).second) changed = true;
      }
    }
    std::set<std::string> live;
    for (const auto& def : prog.definitions)
      if (used.count(def.name)) live.insert(def.name);
    return live;
  }

  std::string next_property_name() {
    std::string name;
    do {
      name = "mooml-pe-" + std::to_string(next_fresh_++);
    } while (preamble_ && preamble_->find(name));
    return name;
  }

  std::string peek_property_name() const {
    int k = next_fresh_;
    std::string name;
    do {
      name = "mooml-pe-" + std::to_string(k++);
    } while (preamble_ && preamble_->find(name));
    return name;
  }

  std::string allocate(const cudf::PropertyType& pt,
                       std::vector<cudf::PropertyValue> values) {
    FreshProperty fp;
    fp.name = next_property_name();
    fp.declared_type = pt;
    for (std::size_t i = 0; i < doc_.universe.size(); ++i)
      fp.values.emplace(doc_.universe[i].ref(), std::move(values[i]));
    transformer_.properties.push_back(std::move(fp));
    return transformer_.properties.back().name;
  }

  ExprPtr replacement(const Plan& plan) {
    if (plan.locality == Locality::local_a) {
      std::string prop = allocate(plan.prop_type, plan.values_a);
      return make_lambda(plan.param,
                         make_proj(make_var(plan.param), prop));
    }
    std::string when_in = allocate(plan.prop_type, plan.values_inst);
    std::string when_out = allocate(plan.prop_type, plan.values_not);
    ExprPtr x = make_var(plan.param);
    return make_lambda(plan.param,
                       make_if(make_proj(x, "is-installed"),
                               make_proj(x, when_in),
                               make_proj(x, when_out)));
  }

  ExprPtr rebuild(const ExprPtr& e) {
    auto it = plans_.find(e.get());
    if (it != plans_.end()) return replacement(it->second);
    switch (e->kind) {
      case Expr::Kind::var:
      case Expr::Kind::lit:
      case Expr::Kind::unit:
      case Expr::Kind::empty_list:
        return e;
      case Expr::Kind::lambda:
        return make_lambda(e->name, rebuild(e->items[0]), e->pos);
      case Expr::Kind::app:
        return make_app(rebuild(e->items[0]), rebuild(e->items[1]), e->pos);
      case Expr::Kind::tuple: {
        std::vector<ExprPtr> items;
        for (const auto& item : e->items) items.push_back(rebuild(item));
        return make_tuple(std::move(items), e->pos);
      }
      case Expr::Kind::record: {
        std::vector<std::pair<std::string, ExprPtr>> fields;
        for (const auto& [label, fe] : e->fields)
          fields.emplace_back(label, rebuild(fe));
        return make_record(std::move(fields), e->pos);
      }
      case Expr::Kind::cons:
        return make_cons(rebuild(e->items[0]), rebuild(e->items[1]), e->pos);
      case Expr::Kind::proj:
        return make_proj(rebuild(e->items[0]), e->name, e->pos);
      case Expr::Kind::let:
        return make_let(e->pattern, rebuild(e->items[0]), rebuild(e->items[1]),
                        e->pos);
      case Expr::Kind::match: {
        std::vector<MatchArm> arms;
        for (const auto& arm : e->arms)
          arms.push_back({arm.pattern, rebuild(arm.body)});
        return make_match(rebuild(e->items[0]), std::move(arms), e->pos);
      }
      case Expr::Kind::ascribe:
        return make_ascribe(rebuild(e->items[0]), e->ascription, e->pos);
    }
    return e;
  }

  // Whole-definition materialization for a dead single-parameter package
  // definition: the definition's own per-package values become one fresh
  // property, and every maximal inner package -> t sub-expression of the
  // same result type is replaced by a lookup of that property. The body
  // is unreferenced afterwards, so this rewrite never changes outcomes.
  ExprPtr try_whole_definition(const Definition& def) {
    if (def.body->kind != Expr::Kind::lambda) return nullptr;
    std::optional<Plan> plan = candidate(def.body);
    if (!plan || plan->locality != Locality::local_a) return nullptr;

    TypePtr whole = node_type(def.body.get());
    if (!whole || resolve(whole)->kind != Type::Kind::arrow) return nullptr;
    std::string result_text = print_type(resolve(whole)->args[1]);

    std::string prop = peek_property_name();
    int found = 0;
    ExprPtr body = swap_inner(def.body->items[0], result_text, prop, &found);
    if (found == 0) return nullptr;
    allocate(plan->prop_type, std::move(plan->values_a));
    return make_lambda(def.body->name, body, def.body->pos);
  }

  TypePtr node_type(const Expr* e) const {
    auto it = node_types_.find(e);
    return it == node_types_.end() ? nullptr : it->second;
  }

  bool swaps_here(const Expr* e, const std::string& result_text) const {
    TypePtr t = node_type(e);
    if (!t) return false;
    TypePtr r = resolve(t);
    if (r->kind != Type::Kind::arrow) return false;
    if (resolve(r->args[0])->kind != Type::Kind::package) return false;
    return print_type(r->args[1]) == result_text;
  }

  ExprPtr swap_inner(const ExprPtr& e, const std::string& result_text,
                     const std::string& prop, int* found) {
    if (swaps_here(e.get(), result_text)) {
      ++*found;
      std::string param = e->kind == Expr::Kind::lambda ? e->name : "q";
      return make_lambda(param, make_proj(make_var(param), prop), e->pos);
    }
    switch (e->kind) {
      case Expr::Kind::var:
      case Expr::Kind::lit:
      case Expr::Kind::unit:
      case Expr::Kind::empty_list:
        return e;
      case Expr::Kind::lambda:
        return make_lambda(e->name,
                           swap_inner(e->items[0], result_text, prop, found),
                           e->pos);
      case Expr::Kind::app:
        return make_app(swap_inner(e->items[0], result_text, prop, found),
                        swap_inner(e->items[1], result_text, prop, found),
                        e->pos);
      case Expr::Kind::tuple: {
        std::vector<ExprPtr> items;
        for (const auto& item : e->items)
          items.push_back(swap_inner(item, result_text, prop, found));
        return make_tuple(std::move(items), e->pos);
      }
      case Expr::Kind::record: {
        std::vector<std::pair<std::string, ExprPtr>> fields;
        for (const auto& [label, fe] : e->fields)
          fields.emplace_back(label, swap_inner(fe, result_text, prop, found));
        return make_record(std::move(fields), e->pos);
      }
      case Expr::Kind::cons:
        return make_cons(swap_inner(e->items[0], result_text, prop, found),
                         swap_inner(e->items[1], result_text, prop, found),
                         e->pos);
      case Expr::Kind::proj:
        return make_proj(swap_inner(e->items[0], result_text, prop, found),
                         e->name, e->pos);
      case Expr::Kind::let:
        return make_let(e->pattern,
                        swap_inner(e->items[0], result_text, prop, found),
                        swap_inner(e->items[1], result_text, prop, found),
                        e->pos);
      case Expr::Kind::match: {
        std::vector<MatchArm> arms;
        for (const auto& arm : e->arms)
          arms.push_back(
              {arm.pattern, swap_inner(arm.body, result_text, prop, found)});
        return make_match(swap_inner(e->items[0], result_text, prop, found),
                          std::move(arms), e->pos);
      }
      case Expr::Kind::ascribe:
        return make_ascribe(swap_inner(e->items[0], result_text, prop, found),
                            e->ascription, e->pos);
    }
    return e;
  }
};

}  // namespace

MoomlProgram inline_definitions(const MoomlProgram& prog) {
  auto subst = inlined_map(prog);
  MoomlProgram out;
  if (prog.constraint) out.constraint = substitute(*prog.constraint, subst);
  for (const auto& crit : prog.criteria)
    out.criteria.push_back({crit.polarity, substitute(crit.expr, subst)});
  return out;
}

cudfmoo::Result<PartialEvalResult> partially_evaluate(
    const cudf::CudfDoc& doc, const MoomlProgram& prog) {
  const cudf::Preamble* preamble = doc.preamble ? &*doc.preamble : nullptr;
  auto typed = infer_program(prog, preamble);
  if (!typed.ok())
    return cudfmoo::Result<PartialEvalResult>::failure(typed.diagnostics);
  Engine engine(doc, prog, typed->node_types);
  return cudfmoo::Result<PartialEvalResult>::success(engine.run(prog));
}

cudfmoo::Result<cudf::CudfDoc> apply_transformer(const Transformer& t,
                                                 const cudf::CudfDoc& doc) {
  cudf::CudfDoc out = doc;
  if (t.properties.empty())
    return cudfmoo::Result<cudf::CudfDoc>::success(std::move(out));
  if (!out.preamble) out.preamble.emplace();
  for (const auto& fp : t.properties) {
    if (out.preamble->find(fp.name))
      return cudfmoo::Result<cudf::CudfDoc>::failure(
          "transformer not applicable: property '" + fp.name +
          "' is already declared");
    out.preamble->declarations.emplace_back(fp.name, fp.declared_type);
    for (auto& pkg : out.universe) {
      auto it = fp.values.find(pkg.ref());
      if (it == fp.values.end())
        return cudfmoo::Result<cudf::CudfDoc>::failure(
            "transformer not applicable: no value of '" + fp.name +
            "' for package " + pkg.name.value + " version " +
            std::to_string(pkg.version.value));
      pkg.extra.emplace_back(fp.name, it->second);
    }
  }
  return cudfmoo::Result<cudf::CudfDoc>::success(std::move(out));
}

}  // namespace mooml
