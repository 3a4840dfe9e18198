#include <algorithm>
#include <numeric>
#include <string>

#include "cudfmoo/oracle.hpp"

namespace oracle {

namespace {

// Universe indices sorted by (name, version); bit i of a status mask
// selects sorted_order[i].
std::vector<std::size_t> sorted_order(const cudf::CudfDoc& doc) {
  std::vector<std::size_t> order(doc.universe.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return doc.universe[a].ref() < doc.universe[b].ref();
  });
  return order;
}

cudf::Solution mask_solution(const cudf::CudfDoc& doc,
                             const std::vector<std::size_t>& order,
                             std::uint64_t mask) {
  cudf::Solution s;
  for (std::size_t i = 0; i < order.size(); ++i)
    if (mask >> i & 1) s.installed.insert(doc.universe[order[i]].ref());
  return s;
}

template <typename T>
cudfmoo::Result<T> check_limit(const cudf::CudfDoc& doc, std::size_t limit) {
  if (doc.universe.size() > limit)
    return cudfmoo::Result<T>::failure(
        "universe has " + std::to_string(doc.universe.size()) +
        " package versions; refusing to enumerate more than 2^" +
        std::to_string(limit) + " statuses");
  return cudfmoo::Result<T>::success(T{});
}

}  // namespace

cudfmoo::Result<std::vector<cudf::Solution>> enumerate_valid(
    const cudf::CudfDoc& doc, std::size_t limit) {
  auto guard = check_limit<std::vector<cudf::Solution>>(doc, limit);
  if (!guard.ok()) return guard;
  std::vector<std::size_t> order = sorted_order(doc);
  std::vector<cudf::Solution> out;
  std::uint64_t count = std::uint64_t{1} << order.size();
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    cudf::Solution s = mask_solution(doc, order, mask);
    if (cudf::is_valid_solution(doc, s).ok) out.push_back(std::move(s));
  }
  return cudfmoo::Result<std::vector<cudf::Solution>>::success(std::move(out));
}

cudfmoo::Result<SolveResult> solve_optimal(const cudf::CudfDoc& doc,
                                           const mooml::MoomlProgram& prog,
                                           std::size_t limit) {
  auto guard = check_limit<SolveResult>(doc, limit);
  if (!guard.ok())
    return cudfmoo::Result<SolveResult>::failure(guard.diagnostics);
  std::vector<std::size_t> order = sorted_order(doc);
  SolveResult result;
  std::uint64_t count = std::uint64_t{1} << order.size();
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    ++result.explored;
    cudf::Solution s = mask_solution(doc, order, mask);
    if (!cudf::is_valid_solution(doc, s).ok) continue;
    ++result.valid_count;
    auto evaluated = mooml::eval_program(doc, s, prog);
    if (std::holds_alternative<mooml::ExecError>(evaluated)) {
      ++result.exec_errors;
      continue;
    }
    mooml::Outcome outcome = std::get<mooml::Outcome>(std::move(evaluated));
    if (!outcome.constraint_holds) continue;
    ++result.admissible;
    if (!result.best) {
      result.best = std::move(s);
      result.outcome = std::move(outcome);
      result.ties = 1;
      continue;
    }
    switch (mooml::compare_outcomes(outcome, *result.outcome)) {
      case mooml::Comparison::a_better:
        result.best = std::move(s);
        result.outcome = std::move(outcome);
        result.ties = 1;
        break;
      case mooml::Comparison::equal:
        ++result.ties;
        break;
      case mooml::Comparison::b_better:
      case mooml::Comparison::incomparable:
        break;
    }
  }
  return cudfmoo::Result<SolveResult>::success(std::move(result));
}

}  // namespace oracle
