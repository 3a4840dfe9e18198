#include "support/reference_semantics.hpp"

namespace refsem {

namespace {

bool installed(const cudf::Solution& s, const cudf::PackageDesc& p) {
  return s.installed.count(p.ref()) > 0;
}

bool version_ok(const cudf::VersionConstraint& c, cudf::Version v) {
  switch (c.op) {
    case cudf::ConstraintOp::any: return true;
    case cudf::ConstraintOp::eq: return v.value == c.version.value;
    case cudf::ConstraintOp::neq: return v.value != c.version.value;
    case cudf::ConstraintOp::lt: return v.value < c.version.value;
    case cudf::ConstraintOp::leq: return v.value <= c.version.value;
    case cudf::ConstraintOp::gt: return v.value > c.version.value;
    case cudf::ConstraintOp::geq: return v.value >= c.version.value;
  }
  return false;
}

// Every way package q can offer `target`: under its real name, or through a
// provides entry. A versionless provides matches any constraint.
bool offers(const cudf::PackageDesc& q, const cudf::VPkg& target) {
  if (q.name.value == target.name.value &&
      version_ok(target.constraint, q.version))
    return true;
  for (const auto& f : q.provides) {
    if (f.name.value != target.name.value) continue;
    if (!f.version.has_value()) return true;
    if (version_ok(target.constraint, *f.version)) return true;
  }
  return false;
}

bool satisfied(const std::vector<cudf::PackageDesc>& universe,
               const cudf::Solution& s, const cudf::VPkg& target) {
  for (const auto& q : universe)
    if (installed(s, q) && offers(q, target)) return true;
  return false;
}

}  // namespace

bool consistent(const std::vector<cudf::PackageDesc>& universe,
                const cudf::Solution& status) {
  for (const auto& p : universe) {
    if (!installed(status, p)) continue;
    for (const auto& clause : p.depends.clauses) {
      bool any = false;
      for (const auto& target : clause)
        if (satisfied(universe, status, target)) any = true;
      if (!any) return false;
    }
  }
  for (const auto& p : universe) {
    if (!installed(status, p)) continue;
    for (const auto& target : p.conflicts) {
      for (const auto& q : universe) {
        if (!installed(status, q)) continue;
        if (q.name.value == p.name.value &&
            q.version.value == p.version.value)
          continue;
        if (offers(q, target)) return false;
      }
    }
  }
  return true;
}

bool valid_solution(const cudf::CudfDoc& doc, const cudf::Solution& proposed) {
  if (!consistent(doc.universe, proposed)) return false;

  cudf::Solution initial;
  for (const auto& p : doc.universe)
    if (p.installed) initial.installed.insert(p.ref());

  for (const auto& v : doc.request.install)
    if (!satisfied(doc.universe, proposed, v)) return false;
  for (const auto& v : doc.request.remove)
    if (satisfied(doc.universe, proposed, v)) return false;

  for (const auto& v : doc.request.upgrade) {
    if (!satisfied(doc.universe, proposed, v)) return false;
    int count = 0;
    std::int64_t version = 0;
    for (const auto& q : doc.universe) {
      if (q.name.value != v.name.value || !installed(proposed, q)) continue;
      ++count;
      version = q.version.value;
    }
    if (count != 1) return false;
    for (const auto& q : doc.universe) {
      if (q.name.value != v.name.value || !installed(initial, q)) continue;
      if (q.version.value > version) return false;
    }
  }

  for (const auto& p : doc.universe) {
    if (!installed(initial, p)) continue;
    switch (p.keep) {
      case cudf::Keep::none:
        break;
      case cudf::Keep::version:
        if (!installed(proposed, p)) return false;
        break;
      case cudf::Keep::package: {
        bool any = false;
        for (const auto& q : doc.universe)
          if (q.name.value == p.name.value && installed(proposed, q))
            any = true;
        if (!any) return false;
        break;
      }
      case cudf::Keep::feature:
        for (const auto& f : p.provides) {
          cudf::VPkg target{f.name, cudf::VersionConstraint{}};
          if (!satisfied(doc.universe, proposed, target)) return false;
        }
        break;
    }
  }
  return true;
}

}  // namespace refsem
