#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "cudfmoo/cudf_text.hpp"
#include "cudfmoo/mooml_syntax.hpp"
#include "cudfmoo/oracle.hpp"
#include "support/generators.hpp"

using namespace oracle;
using mooml::Comparison;
using mooml::Outcome;
using mooml::Polarity;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(CUDFMOO_EXAMPLES_DIR) + "/" + name,
                   std::ios::binary);
  REQUIRE_MESSAGE(in.good(), name);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

cudf::CudfDoc load_doc(const std::string& name) {
  auto r = cudf::parse_document(slurp(name));
  REQUIRE(r.ok());
  return *r;
}

mooml::MoomlProgram load_prog(const std::string& name) {
  auto r = mooml::parse_program(slurp(name));
  REQUIRE(r.ok());
  return *r;
}

cudf::Solution status(
    std::initializer_list<std::pair<const char*, std::int64_t>> refs) {
  cudf::Solution s;
  for (const auto& [n, v] : refs)
    s.installed.insert(cudf::PkgRef{cudf::PkgName{n}, cudf::Version{v}});
  return s;
}

SolveResult solve(const std::string& doc_name, const std::string& prog_name) {
  auto r = solve_optimal(load_doc(doc_name), load_prog(prog_name));
  for (const auto& d : r.diagnostics)
    CAPTURE(d.message);
  REQUIRE(r.ok());
  return *r;
}

}  // namespace

TEST_CASE("the worked examples land on their known optima") {
  SUBCASE("smallest footprint") {
    SolveResult r = solve("size.cudf", "size.moo");
    CHECK(r.explored == 8);
    CHECK(r.valid_count == 3);
    CHECK(r.admissible == 3);
    CHECK(r.ties == 1);
    CHECK(r.exec_errors == 0);
    REQUIRE(r.best.has_value());
    CHECK(*r.best == status({{"app", 1}, {"liba", 1}}));
    REQUIRE(r.outcome.has_value());
    CHECK(r.outcome->measures ==
          std::vector{std::pair{Polarity::minimize, std::int64_t{15}}});
  }
  SUBCASE("freshest versions") {
    SolveResult r = solve("freshness.cudf", "freshness.moo");
    CHECK(r.explored == 32);
    CHECK(r.valid_count == 10);
    CHECK(r.admissible == 10);
    CHECK(r.ties == 2);
    REQUIRE(r.best.has_value());
    CHECK(*r.best == status({{"a", 3}, {"b", 2}}));
    CHECK(r.outcome->measures ==
          std::vector{std::pair{Polarity::maximize, std::int64_t{2}}});
  }
  SUBCASE("pinning as hard constraint admits almost nothing") {
    SolveResult r = solve("pinning.cudf", "pinning-strict.moo");
    CHECK(r.explored == 8);
    CHECK(r.valid_count == 5);
    CHECK(r.admissible == 1);
    CHECK(r.ties == 1);
    REQUIRE(r.best.has_value());
    CHECK(*r.best == status({{"a", 1}}));
    CHECK(r.outcome->constraint_holds);
    CHECK(r.outcome->measures.empty());
  }
  SUBCASE("the two soft pinning readings rank statuses differently") {
    SolveResult count = solve("pinning.cudf", "pinning-count.moo");
    CHECK(count.valid_count == 5);
    CHECK(count.admissible == 5);
    REQUIRE(count.best.has_value());
    // Counting rewards installing more well-pinned packages...
    CHECK(*count.best == status({{"a", 1}, {"a", 2}, {"c", 1}}));
    CHECK(count.outcome->measures ==
          std::vector{std::pair{Polarity::maximize, std::int64_t{2}}});

    SolveResult gap = solve("pinning.cudf", "pinning-gap.moo");
    CHECK(gap.valid_count == 5);
    REQUIRE(gap.best.has_value());
    // ...while gap-minimization prefers not to install the badly pinned
    // version at all. Same document, same taste, different winner.
    CHECK(*gap.best == status({{"a", 1}}));
    CHECK(gap.outcome->measures ==
          std::vector{std::pair{Polarity::minimize, std::int64_t{0}}});
    CHECK(*count.best != *gap.best);
  }
  SUBCASE("security updates outrank freshness lexicographically") {
    SolveResult r = solve("security.cudf", "security.moo");
    CHECK(r.explored == 64);
    CHECK(r.valid_count == 12);
    CHECK(r.admissible == 12);
    CHECK(r.ties == 2);
    REQUIRE(r.best.has_value());
    // b stays at 1 because a 2 (the security fix) depends on it; pure
    // freshness would rather take b 2 and d 2.
    CHECK(*r.best == status({{"a", 2}, {"b", 1}, {"d", 2}}));
    REQUIRE(r.outcome->measures.size() == 2);
    CHECK(r.outcome->measures[0] ==
          std::pair{Polarity::maximize, std::int64_t{1}});
    CHECK(r.outcome->measures[1] ==
          std::pair{Polarity::maximize, std::int64_t{2}});
  }
  SUBCASE("avoiding double installations") {
    SolveResult r = solve("multi-version.cudf", "multi-version.moo");
    CHECK(r.explored == 32);
    CHECK(r.valid_count == 3);
    CHECK(r.ties == 1);
    REQUIRE(r.best.has_value());
    CHECK(*r.best ==
          status({{"app", 1}, {"lib", 1}, {"newlib", 1}, {"tool", 1}}));
    CHECK(r.outcome->measures ==
          std::vector{std::pair{Polarity::minimize, std::int64_t{0}}});
  }
}

TEST_CASE("enumerate_valid returns exactly the valid statuses") {
  cudf::CudfDoc doc = load_doc("freshness.cudf");
  auto r = enumerate_valid(doc);
  REQUIRE(r.ok());
  CHECK(r->size() == 10);
  for (const auto& s : *r)
    CHECK(cudf::is_valid_solution(doc, s).ok);

  // Brute-force cross-count over all statuses of the 5-package universe.
  int expect = 0;
  for (unsigned mask = 0; mask < 32; ++mask) {
    cudf::Solution s;
    for (int i = 0; i < 5; ++i)
      if (mask & (1u << i)) s.installed.insert(doc.universe[i].ref());
    if (cudf::is_valid_solution(doc, s).ok) ++expect;
  }
  CHECK(static_cast<int>(r->size()) == expect);
}

TEST_CASE("universe limits are enforced, not guessed around") {
  std::string text;
  for (int i = 0; i < 5; ++i)
    text += "package: p" + std::to_string(i) + "\nversion: 1\n\n";
  text += "request: \n";
  auto doc = cudf::parse_document(text);
  REQUIRE(doc.ok());

  auto refused = enumerate_valid(*doc, 4);
  REQUIRE_FALSE(refused.ok());
  CHECK(refused.diagnostics[0].message ==
        "universe has 5 package versions; refusing to enumerate more than "
        "2^4 statuses");
  auto ok = enumerate_valid(*doc, 5);
  REQUIRE(ok.ok());
  CHECK(ok->size() == 32);  // independent packages, no request

  auto prog = mooml::parse_program("minimize 0");
  REQUIRE(prog.ok());
  CHECK_FALSE(solve_optimal(*doc, *prog, 4).ok());
}

TEST_CASE("ties break toward the smallest bit-vector") {
  // Two independent optional packages and an indifferent preference: every
  // status is admissible with the same outcome, so the empty one wins.
  auto doc = cudf::parse_document(
      "package: a\nversion: 1\n\npackage: b\nversion: 1\n\nrequest: \n");
  REQUIRE(doc.ok());
  auto prog = mooml::parse_program("minimize 0");
  REQUIRE(prog.ok());
  auto r = solve_optimal(*doc, *prog);
  REQUIRE(r.ok());
  CHECK(r->explored == 4);
  CHECK(r->valid_count == 4);
  CHECK(r->admissible == 4);
  CHECK(r->ties == 4);
  REQUIRE(r->best.has_value());
  CHECK(r->best->installed.empty());
}

TEST_CASE("runtime errors disqualify candidates but are counted") {
  // max over the installed packages errors out on the empty status.
  auto doc = cudf::parse_document("package: a\nversion: 1\n\nrequest: \n");
  REQUIRE(doc.ok());
  auto prog = mooml::parse_program(
      "maximize max (map (fun p -> 1)\n"
      "                 (filter (fun p -> p.is-installed) u))");
  REQUIRE(prog.ok());
  auto r = solve_optimal(*doc, *prog);
  REQUIRE(r.ok());
  CHECK(r->valid_count == 2);
  CHECK(r->exec_errors == 1);
  CHECK(r->admissible == 1);
  REQUIRE(r->best.has_value());
  CHECK(*r->best == status({{"a", 1}}));
}

TEST_CASE("insoluble and inadmissible problems report no best") {
  SUBCASE("no valid solution at all") {
    auto doc = cudf::parse_document(
        "package: a\nversion: 1\ndepends: ghost\n\nrequest: \ninstall: a\n");
    REQUIRE(doc.ok());
    auto prog = mooml::parse_program("minimize 0");
    REQUIRE(prog.ok());
    auto r = solve_optimal(*doc, *prog);
    REQUIRE(r.ok());
    CHECK(r->valid_count == 0);
    CHECK_FALSE(r->best.has_value());
    CHECK_FALSE(r->outcome.has_value());
  }
  SUBCASE("valid solutions exist but the constraint rejects them all") {
    auto doc = cudf::parse_document("package: a\nversion: 1\n\nrequest: \n");
    REQUIRE(doc.ok());
    auto prog = mooml::parse_program("constraint false");
    REQUIRE(prog.ok());
    auto r = solve_optimal(*doc, *prog);
    REQUIRE(r.ok());
    CHECK(r->valid_count == 2);
    CHECK(r->admissible == 0);
    CHECK_FALSE(r->best.has_value());
  }
}

TEST_CASE("the reported optimum is never beaten, and the books balance") {
  gen::Rng rng(314159u);
  int done = 0;
  while (done < 25) {
    cudf::CudfDoc doc = gen::random_doc(rng, 8);
    if (doc.universe.size() > 8) continue;
    mooml::MoomlProgram prog = gen::random_program(rng);
    CAPTURE(cudf::print_document(doc));
    CAPTURE(mooml::print_program(prog));
    ++done;

    auto solved = solve_optimal(doc, prog);
    REQUIRE(solved.ok());
    auto valid = enumerate_valid(doc);
    REQUIRE(valid.ok());
    CHECK(solved->valid_count == valid->size());
    CHECK(solved->explored == (1u << doc.universe.size()));

    std::uint64_t admissible = 0, errors = 0, ties = 0;
    for (const auto& s : *valid) {
      auto out = mooml::eval_program(doc, s, prog);
      if (std::holds_alternative<mooml::ExecError>(out)) {
        ++errors;
        continue;
      }
      const Outcome& o = std::get<Outcome>(out);
      if (!o.constraint_holds) continue;
      ++admissible;
      if (solved->outcome.has_value()) {
        Comparison c = compare_outcomes(o, *solved->outcome);
        CHECK(c != Comparison::a_better);  // nothing beats the reported best
        if (c == Comparison::equal) ++ties;
      }
    }
    CHECK(solved->admissible == admissible);
    CHECK(solved->exec_errors == errors);
    CHECK(solved->best.has_value() == (admissible > 0));
    if (solved->best.has_value()) {
      CHECK(solved->ties == ties);
      CHECK(cudf::is_valid_solution(doc, *solved->best).ok);
    }
  }
}

TEST_CASE("solving is deterministic") {
  for (int i = 0; i < 2; ++i) {
    SolveResult a = solve("security.cudf", "security.moo");
    SolveResult b = solve("security.cudf", "security.moo");
    CHECK(a.best == b.best);
    CHECK(a.ties == b.ties);
    CHECK(a.admissible == b.admissible);
  }
}
