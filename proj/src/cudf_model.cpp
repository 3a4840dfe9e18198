#include "cudfmoo/cudf_model.hpp"

#include <algorithm>
#include <sstream>

namespace cudf {

std::strong_ordering compare_versions(Version a, Version b) {
  return a.value <=> b.value;
}

bool valid_pkg_name(std::string_view s) {
  if (s.empty()) return false;
  auto letter = [](char c) { return c >= 'a' && c <= 'z'; };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!letter(s[0]) && !digit(s[0])) return false;
  for (char c : s) {
    if (!letter(c) && !digit(c) && c != '-' && c != '+' && c != '.')
      return false;
  }
  return true;
}

bool VersionConstraint::matches(Version v) const {
  switch (op) {
    case ConstraintOp::any: return true;
    case ConstraintOp::eq: return v == version;
    case ConstraintOp::neq: return v != version;
    case ConstraintOp::lt: return v < version;
    case ConstraintOp::leq: return v <= version;
    case ConstraintOp::gt: return v > version;
    case ConstraintOp::geq: return v >= version;
  }
  return false;
}

const PropertyType* Preamble::find(std::string_view name) const {
  for (const auto& [n, t] : declarations)
    if (n == name) return &t;
  return nullptr;
}

const PropertyValue* PackageDesc::find_extra(std::string_view n) const {
  for (const auto& [name, v] : extra)
    if (name == n) return &v;
  return nullptr;
}

const PackageDesc* CudfDoc::find(const PkgRef& ref) const {
  for (const auto& p : universe)
    if (p.name == ref.name && p.version == ref.version) return &p;
  return nullptr;
}

Solution initial_status(const CudfDoc& doc) {
  Solution s;
  for (const auto& p : doc.universe)
    if (p.installed) s.installed.insert(p.ref());
  return s;
}

StatusIndex::StatusIndex(const std::vector<PackageDesc>& universe,
                         const Solution& status) {
  for (const auto& p : universe) {
    if (!status.contains(p.ref())) continue;
    by_name_[p.name.value].push_back(p.ref());
    for (const auto& f : p.provides)
      providers_[f.name.value].push_back(Provider{p.ref(), f.version});
  }
}

bool StatusIndex::vpkg_satisfied(const VPkg& target) const {
  static const PkgRef no_exemption{PkgName{""}, Version{0}};
  return vpkg_satisfied_except(target, no_exemption);
}

bool StatusIndex::vpkg_satisfied_except(const VPkg& target,
                                        const PkgRef& except) const {
  if (auto it = by_name_.find(target.name.value); it != by_name_.end()) {
    for (const auto& ref : it->second) {
      if (ref == except) continue;
      if (target.constraint.matches(ref.version)) return true;
    }
  }
  if (auto it = providers_.find(target.name.value); it != providers_.end()) {
    for (const auto& pr : it->second) {
      if (pr.owner == except) continue;
      if (!pr.version.has_value()) return true;  // provides every version
      if (target.constraint.matches(*pr.version)) return true;
    }
  }
  return false;
}

bool StatusIndex::clause_satisfied(const VpkgClause& clause) const {
  return std::any_of(clause.begin(), clause.end(),
                     [&](const VPkg& v) { return vpkg_satisfied(v); });
}

bool StatusIndex::formula_satisfied(const VpkgFormula& formula) const {
  return std::all_of(
      formula.clauses.begin(), formula.clauses.end(),
      [&](const VpkgClause& c) { return clause_satisfied(c); });
}

std::vector<Version> StatusIndex::installed_versions(
    const PkgName& name) const {
  std::vector<Version> out;
  if (auto it = by_name_.find(name.value); it != by_name_.end())
    for (const auto& ref : it->second) out.push_back(ref.version);
  std::sort(out.begin(), out.end());
  return out;
}

bool vpkg_satisfied(const Solution& status,
                    const std::vector<PackageDesc>& universe,
                    const VPkg& target) {
  return StatusIndex(universe, status).vpkg_satisfied(target);
}

bool formula_satisfied(const Solution& status,
                       const std::vector<PackageDesc>& universe,
                       const VpkgFormula& formula) {
  return StatusIndex(universe, status).formula_satisfied(formula);
}

std::string to_string(ConstraintOp op) {
  switch (op) {
    case ConstraintOp::any: return "";
    case ConstraintOp::eq: return "=";
    case ConstraintOp::neq: return "!=";
    case ConstraintOp::lt: return "<";
    case ConstraintOp::leq: return "<=";
    case ConstraintOp::gt: return ">";
    case ConstraintOp::geq: return ">=";
  }
  return "";
}

std::string to_string(const VPkg& v) {
  if (v.constraint.op == ConstraintOp::any) return v.name.value;
  return v.name.value + " " + to_string(v.constraint.op) + " " +
         std::to_string(v.constraint.version.value);
}

std::string to_string(const VpkgClause& clause) {
  std::string out;
  for (size_t i = 0; i < clause.size(); ++i) {
    if (i) out += " | ";
    out += to_string(clause[i]);
  }
  return out;
}

std::string to_string(const VpkgFormula& formula) {
  if (formula.is_true()) return "true";
  std::string out;
  for (size_t i = 0; i < formula.clauses.size(); ++i) {
    if (i) out += ", ";
    out += to_string(formula.clauses[i]);
  }
  return out;
}

std::string vpkglist_to_string(const std::vector<VPkg>& list) {
  std::string out;
  for (size_t i = 0; i < list.size(); ++i) {
    if (i) out += ", ";
    out += to_string(list[i]);
  }
  return out;
}

std::string to_string(const ProvidedFeature& f) {
  if (!f.version) return f.name.value;
  return f.name.value + " = " + std::to_string(f.version->value);
}

std::string to_string(Keep k) {
  switch (k) {
    case Keep::none: return "none";
    case Keep::version: return "version";
    case Keep::package: return "package";
    case Keep::feature: return "feature";
  }
  return "none";
}

static std::string quote_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\\\"";
    else if (c == '\\') out += "\\\\";
    else if (c == '\n') out += "\\n";
    else out += c;
  }
  out += "\"";
  return out;
}

std::string to_string(const PropertyValue& v) {
  switch (v.kind()) {
    case PropertyKind::integer:
      return std::to_string(std::get<std::int64_t>(v.v));
    case PropertyKind::boolean:
      return std::get<bool>(v.v) ? "true" : "false";
    case PropertyKind::string:
      return quote_string(std::get<std::string>(v.v));
    case PropertyKind::enumeration:
      return std::get<EnumValue>(v.v).label;
    case PropertyKind::pkgname:
      return std::get<PkgName>(v.v).value;
    case PropertyKind::vpkglist:
      return vpkglist_to_string(std::get<std::vector<VPkg>>(v.v));
    case PropertyKind::vpkgformula:
      return to_string(std::get<VpkgFormula>(v.v));
  }
  return "";
}

std::string to_string(const PropertyType& t) {
  std::string out;
  switch (t.kind) {
    case PropertyKind::integer: out = "int"; break;
    case PropertyKind::boolean: out = "bool"; break;
    case PropertyKind::string: out = "string"; break;
    case PropertyKind::pkgname: out = "pkgname"; break;
    case PropertyKind::vpkglist: out = "vpkglist"; break;
    case PropertyKind::vpkgformula: out = "vpkgformula"; break;
    case PropertyKind::enumeration: {
      out = "enum(";
      for (size_t i = 0; i < t.enum_labels.size(); ++i) {
        if (i) out += ",";
        out += t.enum_labels[i];
      }
      out += ")";
      break;
    }
  }
  if (t.default_value) out += " = " + to_string(*t.default_value);
  return out;
}

}  // namespace cudf
