#pragma once

#include <string>
#include <variant>
#include <vector>

#include "cudfmoo/cudf_model.hpp"

namespace cudf {

struct Violation {
  enum class Kind {
    abundance,
    peace,
    install_unsat,
    remove_unsat,
    upgrade_unsat,
    upgrade_multi_version,
    upgrade_downgrade,
    keep_broken,
  };
  Kind kind;
  std::variant<PkgRef, VPkg> subject;
  std::string detail;

  std::string to_string() const;
};

std::string to_string(Violation::Kind k);

// Every installed package must have each dependency clause satisfied by the
// status.  One violation per unsatisfied clause.
std::vector<Violation> check_abundance(const std::vector<PackageDesc>& universe,
                                       const Solution& status);

// No installed package may match another installed package's conflict.  A
// package is exempt from its own conflicts, which also covers the features
// it provides itself.
std::vector<Violation> check_peace(const std::vector<PackageDesc>& universe,
                                   const Solution& status);

// Install / remove / upgrade clauses of the request against a proposed
// status.  Upgrades additionally demand a single installed version, not
// older than any initially installed one.
std::vector<Violation> check_request(const Request& request,
                                     const Solution& initial,
                                     const Solution& proposed,
                                     const std::vector<PackageDesc>& universe);

// keep guarantees of initially installed packages.
std::vector<Violation> check_keep(const std::vector<PackageDesc>& universe,
                                  const Solution& initial,
                                  const Solution& proposed);

struct CheckResult {
  bool ok = false;
  std::vector<Violation> violations;
};

// Consistency of the recorded installation status (abundance + peace).
CheckResult is_consistent(const CudfDoc& doc);

// Whether `proposed` is a solution of the document's upgrade problem:
// consistent, request satisfied, keeps honoured.
CheckResult is_valid_solution(const CudfDoc& doc, const Solution& proposed);

}  // namespace cudf
