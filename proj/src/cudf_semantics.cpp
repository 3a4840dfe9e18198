#include "cudfmoo/cudf_semantics.hpp"

#include <algorithm>

namespace cudf {

std::string to_string(Violation::Kind k) {
  switch (k) {
    case Violation::Kind::abundance: return "abundance";
    case Violation::Kind::peace: return "peace";
    case Violation::Kind::install_unsat: return "install-unsat";
    case Violation::Kind::remove_unsat: return "remove-unsat";
    case Violation::Kind::upgrade_unsat: return "upgrade-unsat";
    case Violation::Kind::upgrade_multi_version:
      return "upgrade-multi-version";
    case Violation::Kind::upgrade_downgrade: return "upgrade-downgrade";
    case Violation::Kind::keep_broken: return "keep-broken";
  }
  return "";
}

std::string Violation::to_string() const {
  std::string subj;
  if (std::holds_alternative<PkgRef>(subject)) {
    const auto& r = std::get<PkgRef>(subject);
    subj = r.name.value + " " + std::to_string(r.version.value);
  } else {
    subj = cudf::to_string(std::get<VPkg>(subject));
  }
  return cudf::to_string(kind) + ": " + subj + ": " + detail;
}

std::vector<Violation> check_abundance(const std::vector<PackageDesc>& universe,
                                       const Solution& status) {
  std::vector<Violation> out;
  StatusIndex index(universe, status);
  for (const auto& p : universe) {
    if (!status.contains(p.ref())) continue;
    for (const auto& clause : p.depends.clauses) {
      if (index.clause_satisfied(clause)) continue;
      out.push_back(Violation{
          Violation::Kind::abundance, p.ref(),
          "unsatisfied dependency clause '" + to_string(clause) + "'"});
    }
  }
  return out;
}

namespace {

// Does installed package q match the conflict target?
bool package_matches(const PackageDesc& q, const VPkg& target) {
  if (q.name == target.name && target.constraint.matches(q.version))
    return true;
  for (const auto& f : q.provides) {
    if (f.name != target.name) continue;
    if (!f.version) return true;
    if (target.constraint.matches(*f.version)) return true;
  }
  return false;
}

}  // namespace

std::vector<Violation> check_peace(const std::vector<PackageDesc>& universe,
                                   const Solution& status) {
  std::vector<Violation> out;
  for (const auto& p : universe) {
    if (!status.contains(p.ref())) continue;
    for (const auto& c : p.conflicts) {
      for (const auto& q : universe) {
        if (!status.contains(q.ref())) continue;
        if (q.ref() == p.ref()) continue;  // self-conflict exemption
        if (!package_matches(q, c)) continue;
        out.push_back(Violation{
            Violation::Kind::peace, p.ref(),
            "conflict '" + to_string(c) + "' matched by installed " +
                q.name.value + " " + std::to_string(q.version.value)});
      }
    }
  }
  return out;
}

std::vector<Violation> check_request(const Request& request,
                                     const Solution& initial,
                                     const Solution& proposed,
                                     const std::vector<PackageDesc>& universe) {
  std::vector<Violation> out;
  StatusIndex prop_index(universe, proposed);
  StatusIndex init_index(universe, initial);

  for (const auto& v : request.install) {
    if (prop_index.vpkg_satisfied(v)) continue;
    out.push_back(Violation{Violation::Kind::install_unsat, v,
                            "no installed package satisfies '" + to_string(v) +
                                "'"});
  }
  for (const auto& v : request.remove) {
    if (!prop_index.vpkg_satisfied(v)) continue;
    out.push_back(Violation{Violation::Kind::remove_unsat, v,
                            "an installed package still matches '" +
                                to_string(v) + "'"});
  }
  for (const auto& v : request.upgrade) {
    if (!prop_index.vpkg_satisfied(v)) {
      out.push_back(Violation{Violation::Kind::upgrade_unsat, v,
                              "no installed package satisfies '" +
                                  to_string(v) + "'"});
    }
    auto now = prop_index.installed_versions(v.name);
    if (now.size() != 1) {
      out.push_back(Violation{
          Violation::Kind::upgrade_multi_version, v,
          "expected exactly one installed version of '" + v.name.value +
              "', found " + std::to_string(now.size())});
      continue;
    }
    auto before = init_index.installed_versions(v.name);
    for (const auto& bv : before) {
      if (bv <= now[0]) continue;
      out.push_back(Violation{
          Violation::Kind::upgrade_downgrade, v,
          "version " + std::to_string(now[0].value) +
              " is older than initially installed version " +
              std::to_string(bv.value)});
      break;
    }
  }
  return out;
}

std::vector<Violation> check_keep(const std::vector<PackageDesc>& universe,
                                  const Solution& initial,
                                  const Solution& proposed) {
  std::vector<Violation> out;
  StatusIndex prop_index(universe, proposed);
  for (const auto& p : universe) {
    if (!initial.contains(p.ref())) continue;
    switch (p.keep) {
      case Keep::none:
        break;
      case Keep::version:
        if (!proposed.contains(p.ref()))
          out.push_back(Violation{
              Violation::Kind::keep_broken, p.ref(),
              "keep: version requires this exact version to stay installed"});
        break;
      case Keep::package:
        if (prop_index.installed_versions(p.name).empty())
          out.push_back(Violation{
              Violation::Kind::keep_broken, p.ref(),
              "keep: package requires some version of '" + p.name.value +
                  "' to stay installed"});
        break;
      case Keep::feature:
        for (const auto& f : p.provides) {
          VPkg target{f.name, VersionConstraint{}};
          if (prop_index.vpkg_satisfied(target)) continue;
          out.push_back(Violation{
              Violation::Kind::keep_broken, p.ref(),
              "keep: feature requires '" + f.name.value +
                  "' to remain provided"});
        }
        break;
    }
  }
  return out;
}

CheckResult is_consistent(const CudfDoc& doc) {
  Solution status = initial_status(doc);
  CheckResult res;
  auto a = check_abundance(doc.universe, status);
  auto p = check_peace(doc.universe, status);
  res.violations = std::move(a);
  res.violations.insert(res.violations.end(), p.begin(), p.end());
  res.ok = res.violations.empty();
  return res;
}

CheckResult is_valid_solution(const CudfDoc& doc, const Solution& proposed) {
  Solution initial = initial_status(doc);
  CheckResult res;
  for (auto&& vs : {check_abundance(doc.universe, proposed),
                    check_peace(doc.universe, proposed),
                    check_request(doc.request, initial, proposed, doc.universe),
                    check_keep(doc.universe, initial, proposed)})
    res.violations.insert(res.violations.end(), vs.begin(), vs.end());
  res.ok = res.violations.empty();
  return res;
}

}  // namespace cudf
