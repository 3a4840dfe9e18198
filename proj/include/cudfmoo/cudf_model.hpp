#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace cudf {

// ---------------------------------------------------------------------------
// Core scalars

// Package versions are positive integers ordered naturally.
struct Version {
  std::int64_t value = 1;
  auto operator<=>(const Version&) const = default;
};

std::strong_ordering compare_versions(Version a, Version b);

// Lowercase package name: letters, digits, '-', '+', '.'; must start with a
// letter or digit.
struct PkgName {
  std::string value;
  auto operator<=>(const PkgName&) const = default;
};

bool valid_pkg_name(std::string_view s);

struct PkgRef {
  PkgName name;
  Version version;
  auto operator<=>(const PkgRef&) const = default;
};

// ---------------------------------------------------------------------------
// Version constraints and package formulae

enum class ConstraintOp { any, eq, neq, lt, leq, gt, geq };

struct VersionConstraint {
  ConstraintOp op = ConstraintOp::any;
  Version version{};  // meaningful only when op != any

  bool matches(Version v) const;
  auto operator<=>(const VersionConstraint&) const = default;
};

struct VPkg {
  PkgName name;
  VersionConstraint constraint;
  auto operator<=>(const VPkg&) const = default;
};

// Disjunction of targets; never empty.
using VpkgClause = std::vector<VPkg>;

// Conjunction of clauses; the empty conjunction is trivially true.
struct VpkgFormula {
  std::vector<VpkgClause> clauses;
  bool is_true() const { return clauses.empty(); }
  auto operator<=>(const VpkgFormula&) const = default;
};

// A provided feature: plain name, or name pinned to one version.
struct ProvidedFeature {
  PkgName name;
  std::optional<Version> version;
  auto operator<=>(const ProvidedFeature&) const = default;
};

// ---------------------------------------------------------------------------
// Property typing (preamble declarations)

enum class PropertyKind {
  integer,
  boolean,
  string,
  enumeration,
  pkgname,
  vpkglist,
  vpkgformula,
};

struct EnumValue {
  std::string label;
  auto operator<=>(const EnumValue&) const = default;
};

struct PropertyValue {
  std::variant<std::int64_t, bool, std::string, EnumValue, PkgName,
               std::vector<VPkg>, VpkgFormula>
      v;

  PropertyKind kind() const { return static_cast<PropertyKind>(v.index()); }
  bool operator==(const PropertyValue&) const = default;
};

struct PropertyType {
  PropertyKind kind = PropertyKind::integer;
  std::vector<std::string> enum_labels;  // enumeration only
  std::optional<PropertyValue> default_value;

  bool operator==(const PropertyType&) const = default;
};

struct Preamble {
  // Declaration order is meaningful for printing.
  std::vector<std::pair<std::string, PropertyType>> declarations;

  const PropertyType* find(std::string_view name) const;
  bool operator==(const Preamble&) const = default;
};

// ---------------------------------------------------------------------------
// Package descriptions, requests, documents

enum class Keep { none, version, package, feature };

struct PackageDesc {
  PkgName name;
  Version version;
  VpkgFormula depends;               // default: true
  std::vector<VPkg> conflicts;       // default: empty
  std::vector<ProvidedFeature> provides;  // default: empty
  bool installed = false;
  Keep keep = Keep::none;
  // Extra properties, each declared in the preamble; defaults filled in.
  std::vector<std::pair<std::string, PropertyValue>> extra;

  PkgRef ref() const { return PkgRef{name, version}; }
  const PropertyValue* find_extra(std::string_view n) const;
  bool operator==(const PackageDesc&) const = default;
};

struct Request {
  std::vector<VPkg> install;
  std::vector<VPkg> remove;
  std::vector<VPkg> upgrade;
  std::optional<std::string> preferences;  // raw MooML source text
  bool operator==(const Request&) const = default;
};

struct CudfDoc {
  std::optional<Preamble> preamble;
  std::vector<PackageDesc> universe;  // document order; (name, version) unique
  Request request;

  const PackageDesc* find(const PkgRef& ref) const;
  bool operator==(const CudfDoc&) const = default;
};

// A proposed installation status: a set of members of some universe.
struct Solution {
  std::set<PkgRef> installed;

  bool contains(const PkgRef& ref) const { return installed.count(ref) > 0; }
  bool operator==(const Solution&) const = default;
};

// Initial status of a document: every package flagged installed.
Solution initial_status(const CudfDoc& doc);

// ---------------------------------------------------------------------------
// Satisfaction

// Index of an installation status over a universe, for fast matching.
class StatusIndex {
 public:
  StatusIndex(const std::vector<PackageDesc>& universe, const Solution& status);

  // True when some installed package matches the target, either by owning
  // the name with a version accepted by the constraint, or by providing the
  // feature.  An unversioned provide matches every constraint; a versioned
  // provide matches constraints accepting its version.
  bool vpkg_satisfied(const VPkg& target) const;
  // As above, but ignores the package identified by `except` (used for the
  // self-conflict exemption).
  bool vpkg_satisfied_except(const VPkg& target, const PkgRef& except) const;
  bool clause_satisfied(const VpkgClause& clause) const;
  bool formula_satisfied(const VpkgFormula& formula) const;

  // Installed real versions carrying the given name, ascending.
  std::vector<Version> installed_versions(const PkgName& name) const;

 private:
  struct Provider {
    PkgRef owner;
    std::optional<Version> version;  // empty: provides all versions
  };
  std::unordered_map<std::string, std::vector<PkgRef>> by_name_;
  std::unordered_map<std::string, std::vector<Provider>> providers_;
};

// Convenience wrappers that build a one-shot index.
bool vpkg_satisfied(const Solution& status,
                    const std::vector<PackageDesc>& universe,
                    const VPkg& target);
bool formula_satisfied(const Solution& status,
                       const std::vector<PackageDesc>& universe,
                       const VpkgFormula& formula);

// ---------------------------------------------------------------------------
// Rendering helpers shared by the printer and reports

std::string to_string(ConstraintOp op);
std::string to_string(const VPkg& v);
// A clause joins with " | "; VpkgClause and a plain vpkglist share the C++
// type, so the comma-separated list form gets its own name.
std::string to_string(const VpkgClause& clause);
std::string vpkglist_to_string(const std::vector<VPkg>& list);
std::string to_string(const VpkgFormula& formula);
std::string to_string(const ProvidedFeature& f);
std::string to_string(Keep k);
std::string to_string(const PropertyValue& v);
std::string to_string(const PropertyType& t);

}  // namespace cudf
