#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cudfmoo/cli.hpp"

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

const std::string& scratch_dir() {
  static std::string dir = [] {
    char tmpl[] = "/tmp/cudfmoo-cli-XXXXXX";
    const char* d = mkdtemp(tmpl);
    REQUIRE(d != nullptr);
    return std::string(d);
  }();
  return dir;
}

std::string write_scratch(const std::string& name, const std::string& text) {
  std::string path = scratch_dir() + "/" + name;
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << text;
  out.close();
  return path;
}

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string example(const std::string& name) {
  return std::string(CUDFMOO_EXAMPLES_DIR) + "/" + name;
}

// Runs the CLI in-process with stdout/stderr captured through temporary
// files, restoring the original descriptors afterwards.
CliResult run(const std::vector<std::string>& args) {
  static int counter = 0;
  std::string out_path =
      scratch_dir() + "/out." + std::to_string(counter);
  std::string err_path =
      scratch_dir() + "/err." + std::to_string(counter);
  ++counter;

  std::vector<const char*> argv;
  argv.push_back("cudfmoo-cli");
  for (const auto& a : args) argv.push_back(a.c_str());

  std::cout.flush();
  std::cerr.flush();
  fflush(stdout);
  fflush(stderr);
  int saved_out = dup(STDOUT_FILENO);
  int saved_err = dup(STDERR_FILENO);
  REQUIRE(saved_out >= 0);
  REQUIRE(saved_err >= 0);
  FILE* fo = fopen(out_path.c_str(), "wb");
  FILE* fe = fopen(err_path.c_str(), "wb");
  REQUIRE(fo != nullptr);
  REQUIRE(fe != nullptr);
  dup2(fileno(fo), STDOUT_FILENO);
  dup2(fileno(fe), STDERR_FILENO);

  CliResult r;
  r.code = cudfmoo::run_cli(static_cast<int>(argv.size()), argv.data());

  std::cout.flush();
  std::cerr.flush();
  fflush(stdout);
  fflush(stderr);
  dup2(saved_out, STDOUT_FILENO);
  dup2(saved_err, STDERR_FILENO);
  close(saved_out);
  close(saved_err);
  fclose(fo);
  fclose(fe);

  r.out = read_all(out_path);
  r.err = read_all(err_path);
  return r;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("check") {
  SUBCASE("a consistent document") {
    CliResult r = run({"check", example("sample.cudf")});
    CHECK(r.code == 0);
    CHECK(r.out == "consistent\n");
    CHECK(r.err.empty());
  }
  SUBCASE("an inconsistent document lists sorted violations") {
    std::string doc = write_scratch(
        "two-engines.cudf",
        "package: gas\nversion: 1\nprovides: engine\n"
        "conflicts: engine, gas\ninstalled: true\n\n"
        "package: electric\nversion: 1\nprovides: engine\n"
        "conflicts: engine, electric\ninstalled: true\n\n"
        "request: \n");
    CliResult r = run({"check", doc});
    CHECK(r.code == 1);
    CHECK(contains(r.out, "peace: electric 1"));
    CHECK(contains(r.out, "peace: gas 1"));
    // report is sorted
    CHECK(r.out.find("electric") < r.out.find("gas"));
  }
  SUBCASE("a malformed document is rejected") {
    std::string doc = write_scratch("broken.cudf", "package: a\n\nrequest: \n");
    CliResult r = run({"check", doc});
    CHECK(r.code == 2);
    CHECK(contains(r.err, "missing 'version'"));
    CHECK(contains(r.err, "error: line"));
  }
  SUBCASE("a missing file is an I/O failure") {
    CliResult r = run({"check", scratch_dir() + "/absent.cudf"});
    CHECK(r.code == 3);
    CHECK(contains(r.err, "cannot read"));
  }
}

TEST_CASE("check-solution") {
  std::string good = write_scratch(
      "good.sol",
      "package: app\nversion: 1\ninstalled: true\n\n"
      "package: liba\nversion: 1\ninstalled: true\n");
  std::string bad = write_scratch(
      "bad.sol", "package: app\nversion: 1\ninstalled: true\n");
  std::string unknown = write_scratch(
      "unknown.sol", "package: nosuch\nversion: 1\ninstalled: true\n");

  CliResult ok = run({"check-solution", example("size.cudf"), good});
  CHECK(ok.code == 0);
  CHECK(ok.out == "valid solution\n");

  CliResult broken = run({"check-solution", example("size.cudf"), bad});
  CHECK(broken.code == 1);
  CHECK(contains(broken.out, "abundance: app 1"));

  CliResult rejected = run({"check-solution", example("size.cudf"), unknown});
  CHECK(rejected.code == 2);
  CHECK(contains(rejected.err, "unknown package nosuch version 1"));
}

TEST_CASE("eval") {
  std::string best = write_scratch(
      "best.sol",
      "package: app\nversion: 1\ninstalled: true\n\n"
      "package: liba\nversion: 1\ninstalled: true\n");

  SUBCASE("reports the outcome of the preference program") {
    CliResult r = run({"eval", example("size.cudf"), best, "--preferences",
                       example("size.moo")});
    CHECK(r.code == 0);
    CHECK(r.out == "constraint=true\nmeasure[0]=min:15\n");
  }
  SUBCASE("a failing constraint is a negative verdict") {
    std::string pinned = write_scratch(
        "pinned.sol", "package: a\nversion: 2\ninstalled: true\n");
    CliResult r = run({"eval", example("pinning.cudf"), pinned,
                       "--preferences", example("pinning-strict.moo")});
    CHECK(r.code == 1);
    CHECK(r.out == "constraint=false\n");
  }
  SUBCASE("runtime errors are negative verdicts too") {
    std::string empty = write_scratch("empty.sol", "");
    std::string prefs = write_scratch(
        "crash.moo",
        "maximize max (map (fun p -> 1)\n"
        "                 (filter (fun p -> p.is-installed) u))\n");
    CliResult r = run(
        {"eval", example("size.cudf"), empty, "--preferences", prefs});
    CHECK(r.code == 1);
    CHECK(contains(r.out, "error: empty-list-argument"));
  }
  SUBCASE("document preferences are used when no file is given") {
    std::string doc = write_scratch(
        "embedded.cudf",
        "package: a\nversion: 1\n\n"
        "request: \npreferences: minimize length \\\n"
        "  (filter (fun p -> p.is-installed) u)\n");
    std::string none = write_scratch("none.sol", "");
    CliResult r = run({"eval", doc, none});
    CHECK(r.code == 0);
    CHECK(r.out == "constraint=true\nmeasure[0]=min:0\n");

    // An explicit file overrides them, with a warning.
    std::string zero = write_scratch("zero.moo", "maximize 9");
    CliResult o = run({"eval", doc, none, "--preferences", zero});
    CHECK(o.code == 0);
    CHECK(o.out == "constraint=true\nmeasure[0]=max:9\n");
    CHECK(contains(o.err, "warning: document preferences are overridden"));
  }
  SUBCASE("no preferences anywhere is a usage error") {
    std::string none = write_scratch("none2.sol", "");
    CliResult r = run({"eval", example("size.cudf"), none});
    CHECK(r.code == 2);
    CHECK(contains(r.err, "no preference program"));
  }
  SUBCASE("an ill-typed program is rejected") {
    std::string bad_prog = write_scratch("bad.moo", "minimize true");
    std::string none = write_scratch("none3.sol", "");
    CliResult r = run(
        {"eval", example("size.cudf"), none, "--preferences", bad_prog});
    CHECK(r.code == 2);
    CHECK(contains(r.err, "a criterion must be an integer measure"));
  }
}

TEST_CASE("typecheck") {
  SUBCASE("--stdlib prints the library schemes") {
    CliResult r = run({"typecheck", "--stdlib"});
    CHECK(r.code == 0);
    CHECK(contains(r.out,
                   "fold : forall a b. (a -> b -> b) -> list a -> b -> b\n"));
    CHECK(contains(r.out, "cardinality : forall a. (a -> bool) -> "
                          "list a -> int\n"));
    // one line per stdlib binding
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 21);
  }
  SUBCASE("programs typecheck against a document's preamble") {
    CliResult r = run({"typecheck", example("size.moo"), "--doc",
                       example("size.cudf")});
    CHECK(r.code == 0);
    CHECK(r.out == "size : list package -> int\ncriterion[0] : int\n");

    CliResult s = run({"typecheck", example("pinning-strict.moo"), "--doc",
                       example("pinning.cudf")});
    CHECK(s.code == 0);
    CHECK(s.out == "max-pin : package -> int\nconstraint : bool\n");
  }
  SUBCASE("without the document the extra properties do not exist") {
    CliResult r = run({"typecheck", example("size.moo")});
    CHECK(r.code == 2);
    CHECK(contains(r.err, "installed-size"));
    // freshness only projects builtin fields, so it stands alone.
    CliResult ok = run({"typecheck", example("freshness.moo")});
    CHECK(ok.code == 0);
    CHECK(contains(ok.out, "is-recent : package -> bool\n"));
  }
  SUBCASE("a program argument is required without --stdlib") {
    CliResult r = run({"typecheck"});
    CHECK(r.code == 2);
    CHECK(contains(r.err, "a program file is required"));
  }
}

TEST_CASE("pe") {
  std::string out_doc = scratch_dir() + "/pe-out.cudf";
  std::string out_prog = scratch_dir() + "/pe-out.moo";
  CliResult r = run({"pe", example("freshness.cudf"), example("freshness.moo"),
                     out_doc, out_prog});
  CHECK(r.code == 0);
  CHECK(r.out == "fresh properties: 3\n");
  CHECK(read_all(out_prog) ==
        "let is-recent p = forall (fun q -> q.mooml-pe-0) u\n"
        "maximize cardinality "
        "(fun p -> if p.is-installed then p.mooml-pe-1 else p.mooml-pe-2) u\n");
  CHECK(contains(read_all(out_doc), "property: mooml-pe-0: bool"));

  // The rewritten pair is a valid input again and agrees on the optimum.
  CliResult orig = run({"solve", example("freshness.cudf"), "--preferences",
                        example("freshness.moo")});
  CliResult again = run({"solve", out_doc, "--preferences", out_prog});
  CHECK(orig.code == 0);
  CHECK(again.code == 0);
  CHECK(orig.out == again.out);
}

TEST_CASE("solve") {
  SUBCASE("prints the optimal status and its outcome") {
    CliResult r = run({"solve", example("size.cudf"), "--preferences",
                       example("size.moo")});
    CHECK(r.code == 0);
    CHECK(r.out ==
          "package: app\nversion: 1\ninstalled: true\n\n"
          "package: liba\nversion: 1\ninstalled: true\n"
          "constraint=true\nmeasure[0]=min:15\n");
    CHECK(r.err.empty());
  }
  SUBCASE("--verbose reports statistics on standard error") {
    CliResult r = run({"solve", example("size.cudf"), "--preferences",
                       example("size.moo"), "--verbose"});
    CHECK(r.code == 0);
    CHECK(r.err == "explored=8 valid=3 admissible=3 ties=1 exec-errors=0\n");
  }
  SUBCASE("lexicographic ranking: security fixes before freshness") {
    CliResult r = run({"solve", example("security.cudf"), "--preferences",
                       example("security.moo"), "--verbose"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "package: a\nversion: 2\ninstalled: true\n"));
    CHECK(contains(r.out, "package: b\nversion: 1\ninstalled: true\n"));
    CHECK(contains(r.out, "measure[0]=max:1\nmeasure[1]=max:2\n"));
    CHECK(r.err ==
          "explored=64 valid=12 admissible=12 ties=2 exec-errors=0\n");
  }
  SUBCASE("an insoluble request is unsatisfiable") {
    std::string doc = write_scratch(
        "insoluble.cudf",
        "package: a\nversion: 1\ndepends: ghost\n\nrequest: \ninstall: a\n"
        "preferences: minimize 0\n");
    CliResult r = run({"solve", doc});
    CHECK(r.code == 1);
    CHECK(r.out == "unsatisfiable\n");
  }
  SUBCASE("--limit bounds the enumeration") {
    CliResult r = run({"solve", example("size.cudf"), "--preferences",
                       example("size.moo"), "--limit", "2"});
    CHECK(r.code == 2);
    CHECK(contains(r.err, "refusing to enumerate"));
  }
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"check"}).code == 2);             // missing required argument
  CHECK(run({"--help"}).code == 0);
  CHECK(contains(run({"--help"}).out, "check"));
}
