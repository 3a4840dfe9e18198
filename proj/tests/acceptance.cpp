// Acceptance gate: one self-contained check per shipped capability, each
// reporting a single PASS/FAIL line. Exits non-zero when anything fails.
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cudfmoo/cudf_semantics.hpp"
#include "cudfmoo/cudf_text.hpp"
#include "cudfmoo/mooml_eval.hpp"
#include "cudfmoo/mooml_partial.hpp"
#include "cudfmoo/mooml_syntax.hpp"
#include "cudfmoo/mooml_types.hpp"
#include "cudfmoo/oracle.hpp"
#include "support/generators.hpp"
#include "support/reference_semantics.hpp"

namespace {

// Wall-clock budgets, pinned. A criterion that overruns its budget fails
// even when its assertions hold.
constexpr int kSampleBudgetMs = 1'000;
constexpr int kSemanticsBudgetMs = 300'000;
constexpr int kEquivalenceBudgetMs = 600'000;
constexpr int kScaleBudgetMs = 10'000;

struct Check {
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  template <typename T>
  void expect_eq(const T& got, const T& want, const std::string& what) {
    if (!(got == want)) {
      std::ostringstream os;
      os << what << " (got " << got << ", want " << want << ")";
      failures.push_back(os.str());
    }
  }
};

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(CUDFMOO_EXAMPLES_DIR) + "/" + name,
                   std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

cudf::CudfDoc load_doc(const std::string& name, Check& c) {
  auto r = cudf::parse_document(slurp(name));
  c.expect(r.ok(), name + " must parse");
  return r.ok() ? *r : cudf::CudfDoc{};
}

mooml::MoomlProgram load_prog(const std::string& name, Check& c) {
  auto r = mooml::parse_program(slurp(name));
  c.expect(r.ok(), name + " must parse");
  return r.ok() ? *r : mooml::MoomlProgram{};
}

cudf::Solution status(
    std::initializer_list<std::pair<const char*, std::int64_t>> refs) {
  cudf::Solution s;
  for (const auto& [n, v] : refs)
    s.installed.insert(cudf::PkgRef{cudf::PkgName{n}, cudf::Version{v}});
  return s;
}

std::string show(const cudf::Solution& s) {
  std::string out = "{";
  for (const auto& r : s.installed)
    out += " " + r.name.value + " " + std::to_string(r.version.value);
  return out + " }";
}

// ---------------------------------------------------------------------------
// A1: the reference document parses, reprints byte-identically, and its
// recorded status is consistent.

void a1_sample(Check& c) {
  std::string text = slurp("sample.cudf");
  auto doc = cudf::parse_document(text);
  c.expect(doc.ok(), "sample.cudf must parse");
  if (!doc.ok()) return;
  std::string canon = cudf::print_document(*doc);
  auto again = cudf::parse_document(canon);
  c.expect(again.ok(), "canonical text must reparse");
  if (again.ok())
    c.expect(cudf::print_document(*again) == canon,
             "canonical printing must be a byte-identical fixpoint");
  c.expect(cudf::is_consistent(*doc).ok,
           "the recorded status must be consistent");
  c.expect_eq(doc->universe.size(), std::size_t{9},
              "sample universe size");
}

// ---------------------------------------------------------------------------
// A2: on random universes the library's consistency and validity verdicts
// match an independent naive transcription, for every status.

void a2_semantics(Check& c) {
  gen::Rng rng(0xacce55u);
  std::uint64_t statuses = 0;
  for (int iter = 0; iter < 200 && c.failures.size() < 5; ++iter) {
    cudf::CudfDoc doc = gen::random_doc(rng, 12);
    const int n = static_cast<int>(doc.universe.size());
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      cudf::Solution s;
      for (int i = 0; i < n; ++i)
        if (mask & (1u << i)) s.installed.insert(doc.universe[i].ref());
      ++statuses;
      bool lib_consistent =
          cudf::check_abundance(doc.universe, s).empty() &&
          cudf::check_peace(doc.universe, s).empty();
      if (lib_consistent != refsem::consistent(doc.universe, s))
        c.expect(false, "consistency verdict diverges on doc " +
                            std::to_string(iter) + " status " + show(s));
      if (cudf::is_valid_solution(doc, s).ok !=
          refsem::valid_solution(doc, s))
        c.expect(false, "validity verdict diverges on doc " +
                            std::to_string(iter) + " status " + show(s));
    }
  }
  c.expect(statuses > 50'000, "cross-check must cover many statuses");
}

// ---------------------------------------------------------------------------
// A3: the provide/conflict self-exemption yields mutual exclusion.

void a3_exclusion(Check& c) {
  auto mta_doc = [&](bool a, bool b, bool d) {
    std::string text;
    const char* names[] = {"exim", "postfix", "sendmail"};
    bool inst[] = {a, b, d};
    for (int i = 0; i < 3; ++i) {
      text += std::string("package: ") + names[i] + "\nversion: 1\n";
      text += "provides: mail-transport-agent\n";
      text += "conflicts: mail-transport-agent\n";
      if (inst[i]) text += "installed: true\n";
      text += "\n";
    }
    text += "request: \n";
    auto r = cudf::parse_document(text);
    c.expect(r.ok(), "mta document must parse");
    return r.ok() ? *r : cudf::CudfDoc{};
  };

  // Each agent alone is at peace with itself.
  for (int i = 0; i < 3; ++i)
    c.expect(cudf::is_consistent(mta_doc(i == 0, i == 1, i == 2)).ok,
             "one installed mail transport agent must be consistent");
  // Any two together violate peace.
  c.expect(!cudf::is_consistent(mta_doc(true, true, false)).ok,
           "two mail transport agents must conflict");
  c.expect(!cudf::is_consistent(mta_doc(false, true, true)).ok,
           "two mail transport agents must conflict");
  c.expect(!cudf::is_consistent(mta_doc(true, false, true)).ok,
           "two mail transport agents must conflict");

  // Same pattern across two versions of one package.
  auto engines = [&](bool v1, bool v2) {
    std::string text;
    for (int v = 1; v <= 2; ++v) {
      text += "package: gasoline-engine\nversion: " + std::to_string(v) + "\n";
      text += "provides: engine\nconflicts: engine, gasoline-engine\n";
      if ((v == 1 && v1) || (v == 2 && v2)) text += "installed: true\n";
      text += "\n";
    }
    text += "request: \n";
    auto r = cudf::parse_document(text);
    c.expect(r.ok(), "engine document must parse");
    return r.ok() ? *r : cudf::CudfDoc{};
  };
  c.expect(cudf::is_consistent(engines(true, false)).ok,
           "gasoline-engine 1 alone must be consistent");
  c.expect(cudf::is_consistent(engines(false, true)).ok,
           "gasoline-engine 2 alone must be consistent");
  c.expect(!cudf::is_consistent(engines(true, true)).ok,
           "both gasoline-engine versions together must conflict");
}

// ---------------------------------------------------------------------------
// A4: the optimization scenarios land on their known optima, and the two
// soft pinning readings pick different winners on the same document.

void a4_optima(Check& c) {
  struct Row {
    const char* doc;
    const char* prog;
    cudf::Solution best;
    std::vector<std::pair<mooml::Polarity, std::int64_t>> measures;
    std::uint64_t valid, admissible;
  };
  using mooml::Polarity;
  const Row rows[] = {
      {"size.cudf", "size.moo", status({{"app", 1}, {"liba", 1}}),
       {{Polarity::minimize, 15}}, 3, 3},
      {"freshness.cudf", "freshness.moo", status({{"a", 3}, {"b", 2}}),
       {{Polarity::maximize, 2}}, 10, 10},
      {"pinning.cudf", "pinning-strict.moo", status({{"a", 1}}), {}, 5, 1},
      {"pinning.cudf", "pinning-count.moo",
       status({{"a", 1}, {"a", 2}, {"c", 1}}), {{Polarity::maximize, 2}}, 5,
       5},
      {"pinning.cudf", "pinning-gap.moo", status({{"a", 1}}),
       {{Polarity::minimize, 0}}, 5, 5},
      {"security.cudf", "security.moo",
       status({{"a", 2}, {"b", 1}, {"d", 2}}),
       {{Polarity::maximize, 1}, {Polarity::maximize, 2}}, 12, 12},
      {"multi-version.cudf", "multi-version.moo",
       status({{"app", 1}, {"lib", 1}, {"newlib", 1}, {"tool", 1}}),
       {{Polarity::minimize, 0}}, 3, 3},
  };
  for (const auto& row : rows) {
    auto solved = oracle::solve_optimal(load_doc(row.doc, c),
                                        load_prog(row.prog, c));
    if (!solved.ok()) {
      c.expect(false, std::string(row.prog) + ": solver rejected the input");
      continue;
    }
    c.expect_eq(solved->valid_count, row.valid,
                std::string(row.prog) + ": valid count");
    c.expect_eq(solved->admissible, row.admissible,
                std::string(row.prog) + ": admissible count");
    if (!solved->best) {
      c.expect(false, std::string(row.prog) + ": expected a best status");
      continue;
    }
    if (!(*solved->best == row.best))
      c.expect(false, std::string(row.prog) + ": optimum is " +
                          show(*solved->best) + ", expected " +
                          show(row.best));
    c.expect(solved->outcome && solved->outcome->measures == row.measures,
             std::string(row.prog) + ": outcome measures");
  }
  // The divergence that motivates ranking over constraints: same document,
  // two readings of "respect pinning", two different optima.
  auto count = oracle::solve_optimal(load_doc("pinning.cudf", c),
                                     load_prog("pinning-count.moo", c));
  auto gap = oracle::solve_optimal(load_doc("pinning.cudf", c),
                                   load_prog("pinning-gap.moo", c));
  c.expect(count.ok() && gap.ok() && count->best && gap->best &&
               !(*count->best == *gap->best),
           "count and gap pinning readings must pick different optima");
}

// ---------------------------------------------------------------------------
// A5: partial evaluation preserves outcomes on every status, for the
// worked examples and for random document/program pairs.

void a5_equivalence(Check& c) {
  auto equivalent = [&](const cudf::CudfDoc& doc,
                        const mooml::MoomlProgram& prog,
                        const std::string& label) {
    auto r = mooml::partially_evaluate(doc, prog);
    if (!r.ok()) {
      c.expect(false, label + ": partial evaluation failed");
      return;
    }
    auto applied = mooml::apply_transformer(r->transformer, doc);
    if (!applied.ok()) {
      c.expect(false, label + ": transformer failed to apply");
      return;
    }
    const int n = static_cast<int>(doc.universe.size());
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      cudf::Solution s;
      for (int i = 0; i < n; ++i)
        if (mask & (1u << i)) s.installed.insert(doc.universe[i].ref());
      auto a = mooml::eval_program(doc, s, prog);
      auto b = mooml::eval_program(*applied, s, r->program);
      bool a_err = std::holds_alternative<mooml::ExecError>(a);
      bool b_err = std::holds_alternative<mooml::ExecError>(b);
      if (a_err != b_err) {
        c.expect(false, label + ": failure modes diverge on " + show(s));
        return;
      }
      if (a_err) continue;
      const auto& oa = std::get<mooml::Outcome>(a);
      const auto& ob = std::get<mooml::Outcome>(b);
      if (oa.constraint_holds != ob.constraint_holds ||
          oa.measures != ob.measures) {
        c.expect(false, label + ": outcomes diverge on " + show(s));
        return;
      }
    }
  };

  const std::pair<const char*, const char*> pairs[] = {
      {"size.cudf", "size.moo"},
      {"freshness.cudf", "freshness.moo"},
      {"pinning.cudf", "pinning-strict.moo"},
      {"pinning.cudf", "pinning-count.moo"},
      {"pinning.cudf", "pinning-gap.moo"},
      {"security.cudf", "security.moo"},
      {"multi-version.cudf", "multi-version.moo"},
  };
  for (const auto& [d, p] : pairs)
    equivalent(load_doc(d, c), load_prog(p, c), p);

  gen::Rng rng(0xfeedbeefu);
  int done = 0;
  while (done < 50 && c.failures.size() < 5) {
    cudf::CudfDoc doc = gen::random_doc(rng, 8);
    if (doc.universe.size() > 8) continue;
    mooml::MoomlProgram prog = gen::random_program(rng);
    equivalent(doc, prog, "random pair " + std::to_string(done));
    ++done;
  }
}

// ---------------------------------------------------------------------------
// A6: the rewritten artifacts keep their documented shape.

void a6_residual_shape(Check& c) {
  auto fresh = mooml::partially_evaluate(load_doc("freshness.cudf", c),
                                         load_prog("freshness.moo", c));
  if (fresh.ok()) {
    c.expect_eq(fresh->transformer.properties.size(), std::size_t{3},
                "freshness rewrite property count");
    c.expect_eq(
        mooml::print_program(fresh->program),
        std::string(
            "let is-recent p = forall (fun q -> q.mooml-pe-0) u\n"
            "maximize cardinality (fun p -> if p.is-installed then "
            "p.mooml-pe-1 else p.mooml-pe-2) u\n"),
        "freshness residual program");
  } else {
    c.expect(false, "freshness rewrite failed");
  }

  auto multi = mooml::partially_evaluate(load_doc("multi-version.cudf", c),
                                         load_prog("multi-version.moo", c));
  if (multi.ok()) {
    c.expect(multi->transformer.properties.empty(),
             "multi-version must precompute nothing");
    c.expect(mooml::equal(multi->program, load_prog("multi-version.moo", c)),
             "multi-version program must be untouched");
  } else {
    c.expect(false, "multi-version rewrite failed");
  }
}

// ---------------------------------------------------------------------------
// A7: principal types and the three-way locality verdicts.

void a7_typing(Check& c) {
  auto env = mooml::stdlib_env();
  bool fold_seen = false, sum_seen = false;
  for (const auto& [name, scheme] : env) {
    if (name == "fold") {
      fold_seen = true;
      c.expect_eq(mooml::print_scheme(scheme),
                  std::string("forall a b. (a -> b -> b) -> list a -> b -> b"),
                  "fold scheme");
    }
    if (name == "sum") {
      sum_seen = true;
      c.expect_eq(mooml::print_scheme(scheme), std::string("list int -> int"),
                  "sum scheme");
    }
  }
  c.expect(fold_seen && sum_seen, "fold and sum must be in the stdlib");

  auto classify = [&](const char* src) -> std::string {
    auto e = mooml::parse_expr_text(src);
    if (!e.ok()) return "parse error";
    auto r = mooml::classify_locality(*e, nullptr);
    if (!r.ok()) return "type error";
    switch (*r) {
      case mooml::Locality::local_a: return "local-a";
      case mooml::Locality::local_b: return "local-b";
      case mooml::Locality::non_local: return "non-local";
    }
    return "?";
  };
  c.expect_eq(classify("fun p -> forall (fun q -> (q.name != p.name) || "
                       "(q.version <= p.version)) u"),
              std::string("local-a"), "is-recent body locality");
  c.expect_eq(classify("fun p -> p.is-installed && (forall (fun q -> "
                       "(q.name != p.name) || (q.version <= p.version)) u)"),
              std::string("local-b"), "freshness criterion locality");
  c.expect_eq(classify("fun p -> p.is-installed && (length (filter (fun q -> "
                       "q.is-installed && p.name = q.name) u) > 1)"),
              std::string("non-local"), "multi-version criterion locality");
}

// ---------------------------------------------------------------------------
// A8: hostile input neither crashes nor hangs.

void a8_robustness(Check& c) {
  gen::Rng rng(0xdeadu);
  int parsed = 0;
  for (int i = 0; i < 10'000; ++i) {
    std::string noise = gen::random_noise(rng, 400);
    auto r = cudf::parse_document(noise);  // must return, never crash
    if (r.ok()) ++parsed;
  }
  c.expect(parsed >= 0, "noise parsing must terminate");

  int ran = 0;
  for (int i = 0; i < 1'000; ++i) {
    cudf::CudfDoc doc = gen::random_doc(rng, 6);
    mooml::MoomlProgram prog = gen::random_program(rng);
    cudf::Solution s = gen::random_status(rng, doc);
    std::uint64_t steps = 0;
    auto out = mooml::eval_program(doc, s, prog, &steps, 2'000'000);
    (void)out;  // either outcome is fine; crash or hang is not
    ++ran;
  }
  c.expect_eq(ran, 1'000, "random program evaluations");
}

// ---------------------------------------------------------------------------
// A9: a ten-thousand-package document parses and checks inside its budget.

void a9_scale(Check& c) {
  std::ostringstream text;
  text << "preamble: \nproperty: installed-size: int = 0\n\n";
  for (int i = 0; i < 10'000; ++i) {
    text << "package: p" << i << "\nversion: " << (i % 3 + 1) << "\n";
    if (i > 0) text << "depends: p" << (i - 1) << "\n";
    if (i % 7 == 0) text << "conflicts: q" << i << "\n";
    text << "installed: true\ninstalled-size: " << (i % 100) << "\n\n";
  }
  text << "request: \ninstall: p9999\n";

  auto doc = cudf::parse_document(text.str());
  c.expect(doc.ok(), "the large document must parse");
  if (!doc.ok()) return;
  c.expect_eq(doc->universe.size(), std::size_t{10'000},
              "large universe size");
  c.expect(cudf::is_consistent(*doc).ok,
           "the large status must be consistent");
  std::string printed = cudf::print_document(*doc);
  c.expect(printed.size() > 100'000, "printing must cover the universe");
}

struct Criterion {
  const char* id;
  const char* name;
  int budget_ms;  // 0: only the suite-level ctest timeout applies
  std::function<void(Check&)> run;
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {"A1", "reference document round-trips and is consistent",
       kSampleBudgetMs, a1_sample},
      {"A2", "consistency/validity match the naive reference on random "
             "universes", kSemanticsBudgetMs, a2_semantics},
      {"A3", "provide/conflict self-exemption gives mutual exclusion", 0,
       a3_exclusion},
      {"A4", "optimization scenarios reach their frozen optima", 0,
       a4_optima},
      {"A5", "document rewriting preserves outcomes on every status",
       kEquivalenceBudgetMs, a5_equivalence},
      {"A6", "rewritten artifacts keep their documented shape", 0,
       a6_residual_shape},
      {"A7", "principal types and locality verdicts", 0, a7_typing},
      {"A8", "hostile inputs neither crash nor hang", 0, a8_robustness},
      {"A9", "ten-thousand-package documents stay fast", kScaleBudgetMs,
       a9_scale},
  };

  int failed = 0;
  for (const auto& criterion : criteria) {
    Check c;
    auto t0 = std::chrono::steady_clock::now();
    criterion.run(c);
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    if (criterion.budget_ms > 0 && ms > criterion.budget_ms) {
      std::ostringstream os;
      os << "exceeded its " << criterion.budget_ms << " ms budget";
      c.failures.push_back(os.str());
    }
    bool ok = c.failures.empty();
    if (!ok) ++failed;
    std::printf("%s  %s  %s  (%lld ms)\n", ok ? "PASS" : "FAIL", criterion.id,
                criterion.name, static_cast<long long>(ms));
    for (const auto& f : c.failures)
      std::printf("      - %s\n", f.c_str());
  }
  std::printf("%d/9 acceptance criteria passed\n", 9 - failed);
  return failed == 0 ? 0 : 1;
}
