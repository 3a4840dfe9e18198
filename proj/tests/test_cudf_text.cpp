#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "cudfmoo/cudf_text.hpp"
#include "support/generators.hpp"

using namespace cudf;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

CudfDoc must_parse(const std::string& text) {
  auto r = parse_document(text);
  for (const auto& d : r.diagnostics)
    CAPTURE(d.message);
  REQUIRE(r.ok());
  return *r;
}

bool has_diag(const cudfmoo::Result<CudfDoc>& r, const std::string& needle) {
  for (const auto& d : r.diagnostics)
    if (d.message.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("sample document parses with continuations and extras") {
  CudfDoc doc = must_parse(slurp(std::string(CUDFMOO_EXAMPLES_DIR) +
                                 "/sample.cudf"));

  REQUIRE(doc.preamble.has_value());
  REQUIRE(doc.preamble->declarations.size() == 2);
  const auto& [suite_name, suite] = doc.preamble->declarations[0];
  CHECK(suite_name == "suite");
  CHECK(suite.kind == PropertyKind::enumeration);
  CHECK(suite.enum_labels == std::vector<std::string>{"stable", "unstable"});
  // The default is split over a backslash continuation in the source.
  REQUIRE(suite.default_value.has_value());
  CHECK(std::get<EnumValue>(suite.default_value->v).label == "stable");

  const PackageDesc* car = doc.find(PkgRef{PkgName{"car"}, Version{1}});
  REQUIRE(car != nullptr);
  CHECK(car->installed);
  CHECK(car->depends.clauses.size() == 4);
  REQUIRE(car->find_extra("bugs") != nullptr);
  CHECK(std::get<std::int64_t>(car->find_extra("bugs")->v) == 183);
  // Unstated extras are materialized at their declared default.
  REQUIRE(car->find_extra("suite") != nullptr);
  CHECK(std::get<EnumValue>(car->find_extra("suite")->v).label == "stable");

  const PackageDesc* bicycle = doc.find(PkgRef{PkgName{"bicycle"}, Version{7}});
  REQUIRE(bicycle != nullptr);
  CHECK_FALSE(bicycle->installed);
  REQUIRE(bicycle->find_extra("suite") != nullptr);
  CHECK(std::get<EnumValue>(bicycle->find_extra("suite")->v).label ==
        "unstable");

  const PackageDesc* ge =
      doc.find(PkgRef{PkgName{"gasoline-engine"}, Version{1}});
  REQUIRE(ge != nullptr);
  REQUIRE(ge->provides.size() == 1);
  CHECK(ge->provides[0].name.value == "engine");
  CHECK_FALSE(ge->provides[0].version.has_value());
  REQUIRE(ge->conflicts.size() == 2);
  CHECK(ge->conflicts[0].name.value == "engine");
  CHECK(ge->conflicts[1].name.value == "gasoline-engine");

  CHECK(doc.request.install.size() == 2);
  CHECK(doc.request.install[1].constraint.op == ConstraintOp::eq);
  CHECK(doc.request.upgrade.size() == 2);
  CHECK(doc.request.upgrade[1].constraint.op == ConstraintOp::gt);
  CHECK(doc.request.upgrade[1].constraint.version.value == 2);
}

TEST_CASE("canonical print is a fixpoint and orders properties") {
  const char* text =
      "# comment outside a stanza\n"
      "package: b\n"
      "installed: true\n"
      "keep: version\n"
      "version: 2\n"
      "depends: a | c >= 2, d\n"
      "# comment inside\n"
      "conflicts: e\n"
      "provides: virt = 3\n"
      "\n"
      "\n"
      "request: \n";
  CudfDoc doc = must_parse(text);
  std::string canon = print_document(doc);
  // Core properties re-emerge in declaration order regardless of the input.
  CHECK(canon ==
        "package: b\n"
        "version: 2\n"
        "depends: a | c >= 2, d\n"
        "provides: virt = 3\n"
        "conflicts: e\n"
        "installed: true\n"
        "keep: version\n"
        "\n"
        "request:\n");
  CHECK(print_document(must_parse(canon)) == canon);
}

TEST_CASE("defaults are omitted when printing") {
  const char* text =
      "preamble: \n"
      "property: bugs: int = 0\n"
      "property: suite: string = \"stable\"\n"
      "\n"
      "package: a\n"
      "version: 1\n"
      "bugs: 0\n"
      "suite: \"other\"\n"
      "\n"
      "request: \n";
  CudfDoc doc = must_parse(text);
  std::string canon = print_document(doc);
  CHECK(canon.find("bugs") != std::string::npos);       // declaration stays
  CHECK(canon.find("bugs: 0\n") == std::string::npos);  // value is the default
  CHECK(canon.find("suite: \"other\"") != std::string::npos);
}

TEST_CASE("missing defaults make extra properties mandatory") {
  const char* text =
      "preamble: \n"
      "property: score: int\n"
      "\n"
      "package: a\n"
      "version: 1\n"
      "\n"
      "request: \n";
  auto r = parse_document(text);
  CHECK_FALSE(r.ok());
  CHECK(has_diag(r, "missing required property 'score'"));
}

TEST_CASE("parse errors carry positions and messages") {
  SUBCASE("missing version") {
    auto r = parse_document("package: a\n\nrequest: \n");
    CHECK_FALSE(r.ok());
    CHECK(has_diag(r, "missing 'version'"));
  }
  SUBCASE("bad version") {
    auto r = parse_document("package: a\nversion: 0\n\nrequest: \n");
    CHECK_FALSE(r.ok());
    CHECK(has_diag(r, "version must be a positive integer"));
  }
  SUBCASE("duplicate property") {
    auto r =
        parse_document("package: a\nversion: 1\nversion: 2\n\nrequest: \n");
    CHECK_FALSE(r.ok());
    CHECK(has_diag(r, "duplicate property 'version'"));
  }
  SUBCASE("duplicate package") {
    auto r = parse_document(
        "package: a\nversion: 1\n\npackage: a\nversion: 1\n\nrequest: \n");
    CHECK_FALSE(r.ok());
    CHECK(has_diag(r, "duplicate package"));
  }
  SUBCASE("undeclared extra") {
    auto r =
        parse_document("package: a\nversion: 1\nbugs: 3\n\nrequest: \n");
    CHECK_FALSE(r.ok());
    CHECK(has_diag(r, "undeclared property 'bugs'"));
  }
  SUBCASE("enum value outside the declared labels") {
    auto r = parse_document(
        "preamble: \n"
        "property: suite: enum(stable,unstable) = \"stable\"\n"
        "\n"
        "package: a\nversion: 1\nsuite: testing\n\nrequest: \n");
    CHECK_FALSE(r.ok());
    CHECK(has_diag(r, "not among the declared enum labels"));
  }
  SUBCASE("missing request") {
    auto r = parse_document("package: a\nversion: 1\n");
    CHECK_FALSE(r.ok());
    CHECK(has_diag(r, "missing request stanza"));
  }
  SUBCASE("unknown stanza") {
    auto r = parse_document("bogus: x\n\nrequest: \n");
    CHECK_FALSE(r.ok());
    CHECK(has_diag(r, "unknown stanza"));
  }
  SUBCASE("bad keep") {
    auto r = parse_document(
        "package: a\nversion: 1\nkeep: forever\n\nrequest: \n");
    CHECK_FALSE(r.ok());
    CHECK(has_diag(r, "keep must be none, version, package or feature"));
  }
  SUBCASE("diagnostics carry line numbers") {
    auto r = parse_document("package: a\nversion: zero\n\nrequest: \n");
    REQUIRE_FALSE(r.ok());
    REQUIRE_FALSE(r.diagnostics.empty());
    CHECK(r.diagnostics[0].line == 2);
  }
}

TEST_CASE("request carries raw preferences text") {
  const char* text =
      "package: a\nversion: 1\n\n"
      "request: \n"
      "install: a\n"
      "preferences: minimize sum \\\n"
      "  (map (fun p -> p.version) u)\n";
  CudfDoc doc = must_parse(text);
  REQUIRE(doc.request.preferences.has_value());
  // Continuation lines are joined with a single space, like any property.
  CHECK(*doc.request.preferences ==
        "minimize sum (map (fun p -> p.version) u)");
}

TEST_CASE("solutions parse as lenient package fragments") {
  CudfDoc doc = must_parse(
      "preamble: \n"
      "property: score: int\n"
      "\n"
      "package: a\nversion: 1\nscore: 4\n\n"
      "package: a\nversion: 2\nscore: 5\n\n"
      "request: \n");

  SUBCASE("extras may be absent or unknown in a solution") {
    auto s = parse_solution(
        "package: a\nversion: 1\ninstalled: true\nwhatever: ignored\n", doc);
    REQUIRE(s.ok());
    CHECK(s->installed.size() == 1);
    CHECK(s->contains(PkgRef{PkgName{"a"}, Version{1}}));
  }
  SUBCASE("installed defaults to false") {
    auto s = parse_solution("package: a\nversion: 1\n", doc);
    REQUIRE(s.ok());
    CHECK(s->installed.empty());
  }
  SUBCASE("unknown packages are rejected") {
    auto s = parse_solution("package: b\nversion: 1\ninstalled: true\n", doc);
    CHECK_FALSE(s.ok());
    REQUIRE_FALSE(s.diagnostics.empty());
    CHECK(s.diagnostics[0].message.find("unknown package b version 1") !=
          std::string::npos);
  }
  SUBCASE("a request stanza is not a status") {
    auto s = parse_solution("request: \ninstall: a\n", doc);
    CHECK_FALSE(s.ok());
  }
  SUBCASE("print round-trip") {
    Solution sol;
    sol.installed.insert(PkgRef{PkgName{"a"}, Version{2}});
    auto back = parse_solution(print_solution(sol), doc);
    REQUIRE(back.ok());
    CHECK(*back == sol);
  }
}

TEST_CASE("random documents hit the print/parse fixpoint") {
  gen::Rng rng(20260814u);
  for (int i = 0; i < 100; ++i) {
    CudfDoc doc = gen::random_doc(rng, 30);
    std::string once = print_document(doc);
    CAPTURE(once);
    auto back = parse_document(once);
    REQUIRE(back.ok());
    CHECK(print_document(*back) == once);
    CHECK(back->universe.size() == doc.universe.size());
  }
}
