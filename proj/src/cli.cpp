#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cudfmoo/cli.hpp"
#include "cudfmoo/cudf_semantics.hpp"
#include "cudfmoo/cudf_text.hpp"
#include "cudfmoo/mooml_eval.hpp"
#include "cudfmoo/mooml_partial.hpp"
#include "cudfmoo/mooml_syntax.hpp"
#include "cudfmoo/mooml_types.hpp"
#include "cudfmoo/oracle.hpp"

namespace cudfmoo {

std::string ParseDiagnostic::to_string() const {
  std::ostringstream os;
  os << (severity == Severity::warning ? "warning: " : "error: ");
  if (line > 0) {
    os << "line " << line;
    if (column > 0) os << ", column " << column;
    os << ": ";
  }
  os << message;
  return os.str();
}

namespace {

constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kRejected = 2;
constexpr int kIoError = 3;

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return buf.str();
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << text;
  return static_cast<bool>(out.flush());
}

void report_diagnostics(const std::string& source,
                        const std::vector<ParseDiagnostic>& diagnostics) {
  for (const auto& d : diagnostics)
    std::cerr << source << ": " << d.to_string() << "\n";
}

void report_violations(const std::vector<cudf::Violation>& violations) {
  std::vector<std::string> lines;
  lines.reserve(violations.size());
  for (const auto& v : violations) lines.push_back(v.to_string());
  std::sort(lines.begin(), lines.end());
  for (const auto& line : lines) std::cout << line << "\n";
}

// Loads and parses one CUDF document; on failure stores the exit code.
std::optional<cudf::CudfDoc> load_doc(const std::string& path, int* code) {
  auto text = read_file(path);
  if (!text) {
    std::cerr << "cannot read " << path << "\n";
    *code = kIoError;
    return std::nullopt;
  }
  auto doc = cudf::parse_document(*text);
  report_diagnostics(path, doc.diagnostics);
  if (!doc.ok()) {
    *code = kRejected;
    return std::nullopt;
  }
  return std::move(*doc);
}

std::optional<cudf::Solution> load_solution(const std::string& path,
                                            const cudf::CudfDoc& doc,
                                            int* code) {
  auto text = read_file(path);
  if (!text) {
    std::cerr << "cannot read " << path << "\n";
    *code = kIoError;
    return std::nullopt;
  }
  auto sol = cudf::parse_solution(*text, doc);
  report_diagnostics(path, sol.diagnostics);
  if (!sol.ok()) {
    *code = kRejected;
    return std::nullopt;
  }
  return std::move(*sol);
}

// Preference program source: an explicit file wins over the document's
// embedded `preferences:` property, with a warning when both exist.
std::optional<std::string> preference_text(const cudf::CudfDoc& doc,
                                           const std::string& prefs_path,
                                           int* code) {
  if (!prefs_path.empty()) {
    if (doc.request.preferences)
      std::cerr << "warning: document preferences are overridden by "
                << prefs_path << "\n";
    auto text = read_file(prefs_path);
    if (!text) {
      std::cerr << "cannot read " << prefs_path << "\n";
      *code = kIoError;
      return std::nullopt;
    }
    return text;
  }
  if (doc.request.preferences) return doc.request.preferences;
  std::cerr << "no preference program: the document has no preferences "
               "property and no --preferences file was given\n";
  *code = kRejected;
  return std::nullopt;
}

std::optional<mooml::MoomlProgram> load_program(const cudf::CudfDoc& doc,
                                                const std::string& prefs_path,
                                                int* code) {
  auto text = preference_text(doc, prefs_path, code);
  if (!text) return std::nullopt;
  auto prog = mooml::parse_program(*text);
  report_diagnostics("preferences", prog.diagnostics);
  if (!prog.ok()) {
    *code = kRejected;
    return std::nullopt;
  }
  const cudf::Preamble* preamble =
      doc.preamble ? &*doc.preamble : nullptr;
  auto typed = mooml::infer_program(*prog, preamble);
  report_diagnostics("preferences", typed.diagnostics);
  if (!typed.ok()) {
    *code = kRejected;
    return std::nullopt;
  }
  return std::move(*prog);
}

void print_outcome(const mooml::Outcome& outcome) {
  std::cout << "constraint=" << (outcome.constraint_holds ? "true" : "false")
            << "\n";
  for (std::size_t i = 0; i < outcome.measures.size(); ++i) {
    const auto& [polarity, value] = outcome.measures[i];
    std::cout << "measure[" << i << "]="
              << (polarity == mooml::Polarity::minimize ? "min" : "max") << ":"
              << value << "\n";
  }
}

int cmd_check(const std::string& doc_path) {
  int code = kOk;
  auto doc = load_doc(doc_path, &code);
  if (!doc) return code;
  auto result = cudf::is_consistent(*doc);
  if (result.ok) {
    std::cout << "consistent\n";
    return kOk;
  }
  report_violations(result.violations);
  return kNegative;
}

int cmd_check_solution(const std::string& doc_path,
                       const std::string& sol_path) {
  int code = kOk;
  auto doc = load_doc(doc_path, &code);
  if (!doc) return code;
  auto sol = load_solution(sol_path, *doc, &code);
  if (!sol) return code;
  auto result = cudf::is_valid_solution(*doc, *sol);
  if (result.ok) {
    std::cout << "valid solution\n";
    return kOk;
  }
  report_violations(result.violations);
  return kNegative;
}

int cmd_eval(const std::string& doc_path, const std::string& sol_path,
             const std::string& prefs_path) {
  int code = kOk;
  auto doc = load_doc(doc_path, &code);
  if (!doc) return code;
  auto sol = load_solution(sol_path, *doc, &code);
  if (!sol) return code;
  auto prog = load_program(*doc, prefs_path, &code);
  if (!prog) return code;
  auto outcome = mooml::eval_program(*doc, *sol, *prog);
  if (const auto* err = std::get_if<mooml::ExecError>(&outcome)) {
    std::cout << "error: " << err->to_string() << "\n";
    return kNegative;
  }
  print_outcome(std::get<mooml::Outcome>(outcome));
  return std::get<mooml::Outcome>(outcome).constraint_holds ? kOk : kNegative;
}

int cmd_typecheck(const std::string& prog_path, const std::string& doc_path,
                  bool stdlib) {
  if (stdlib) {
    for (const auto& [name, scheme] : mooml::stdlib_env())
      std::cout << name << " : " << mooml::print_scheme(scheme) << "\n";
    return kOk;
  }
  if (prog_path.empty()) {
    std::cerr << "a program file is required unless --stdlib is given\n";
    return kRejected;
  }
  auto text = read_file(prog_path);
  if (!text) {
    std::cerr << "cannot read " << prog_path << "\n";
    return kIoError;
  }
  auto prog = mooml::parse_program(*text);
  report_diagnostics(prog_path, prog.diagnostics);
  if (!prog.ok()) return kRejected;

  std::optional<cudf::CudfDoc> doc;
  if (!doc_path.empty()) {
    int code = kOk;
    doc = load_doc(doc_path, &code);
    if (!doc) return code;
  }
  const cudf::Preamble* preamble =
      doc && doc->preamble ? &*doc->preamble : nullptr;
  auto typed = mooml::infer_program(*prog, preamble);
  report_diagnostics(prog_path, typed.diagnostics);
  if (!typed.ok()) return kRejected;

  for (std::size_t i = 0; i < prog->definitions.size(); ++i)
    std::cout << prog->definitions[i].name << " : "
              << mooml::print_scheme(typed->definition_schemes[i]) << "\n";
  if (prog->constraint) std::cout << "constraint : bool\n";
  for (std::size_t i = 0; i < prog->criteria.size(); ++i)
    std::cout << "criterion[" << i << "] : int\n";
  return kOk;
}

int cmd_pe(const std::string& doc_path, const std::string& prog_path,
           const std::string& out_doc_path, const std::string& out_prog_path) {
  int code = kOk;
  auto doc = load_doc(doc_path, &code);
  if (!doc) return code;
  auto text = read_file(prog_path);
  if (!text) {
    std::cerr << "cannot read " << prog_path << "\n";
    return kIoError;
  }
  auto prog = mooml::parse_program(*text);
  report_diagnostics(prog_path, prog.diagnostics);
  if (!prog.ok()) return kRejected;

  auto pe = mooml::partially_evaluate(*doc, *prog);
  report_diagnostics(prog_path, pe.diagnostics);
  if (!pe.ok()) return kRejected;
  auto rewritten = mooml::apply_transformer(pe->transformer, *doc);
  report_diagnostics(doc_path, rewritten.diagnostics);
  if (!rewritten.ok()) return kRejected;

  if (!write_file(out_doc_path, cudf::print_document(*rewritten))) {
    std::cerr << "cannot write " << out_doc_path << "\n";
    return kIoError;
  }
  if (!write_file(out_prog_path, mooml::print_program(pe->program))) {
    std::cerr << "cannot write " << out_prog_path << "\n";
    return kIoError;
  }
  std::cout << "fresh properties: " << pe->transformer.properties.size()
            << "\n";
  return kOk;
}

int cmd_solve(const std::string& doc_path, const std::string& prefs_path,
              std::size_t limit, bool verbose) {
  int code = kOk;
  auto doc = load_doc(doc_path, &code);
  if (!doc) return code;
  auto prog = load_program(*doc, prefs_path, &code);
  if (!prog) return code;
  auto solved = oracle::solve_optimal(*doc, *prog, limit);
  report_diagnostics(doc_path, solved.diagnostics);
  if (!solved.ok()) return kRejected;
  if (verbose) {
    std::cerr << "explored=" << solved->explored
              << " valid=" << solved->valid_count
              << " admissible=" << solved->admissible
              << " ties=" << solved->ties
              << " exec-errors=" << solved->exec_errors << "\n";
  }
  if (!solved->best) {
    std::cout << "unsatisfiable\n";
    return kNegative;
  }
  std::cout << cudf::print_solution(*solved->best);
  print_outcome(*solved->outcome);
  return kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"CUDF upgrade scenarios and MooML preference programs"};
  app.require_subcommand(1);

  std::string doc_path, sol_path, prog_path, out_doc_path, out_prog_path;
  std::string prefs_path;
  std::size_t limit = oracle::kDefaultUniverseLimit;
  bool verbose = false;
  bool stdlib = false;

  auto* check =
      app.add_subcommand("check", "check the recorded status for consistency");
  check->add_option("doc", doc_path, "CUDF document")->required();

  auto* check_solution = app.add_subcommand(
      "check-solution", "validate a proposed solution against a document");
  check_solution->add_option("doc", doc_path, "CUDF document")->required();
  check_solution->add_option("solution", sol_path, "package-list fragment")
      ->required();

  auto* eval = app.add_subcommand(
      "eval", "evaluate the preference program on a proposed solution");
  eval->add_option("doc", doc_path, "CUDF document")->required();
  eval->add_option("solution", sol_path, "package-list fragment")->required();
  eval->add_option("--preferences", prefs_path,
                   "preference program file (overrides the document)");

  auto* typecheck =
      app.add_subcommand("typecheck", "print principal type schemes");
  typecheck->add_option("program", prog_path, "preference program file");
  typecheck->add_option("--doc", doc_path,
                        "CUDF document supplying the preamble");
  typecheck->add_flag("--stdlib", stdlib,
                      "print the standard library schemes and exit");

  auto* pe = app.add_subcommand(
      "pe", "partially evaluate a program against a document");
  pe->add_option("doc", doc_path, "CUDF document")->required();
  pe->add_option("program", prog_path, "preference program file")->required();
  pe->add_option("out-doc", out_doc_path, "rewritten document output")
      ->required();
  pe->add_option("out-program", out_prog_path, "rewritten program output")
      ->required();

  auto* solve = app.add_subcommand(
      "solve", "enumerate all statuses and print an optimal solution");
  solve->add_option("doc", doc_path, "CUDF document")->required();
  solve->add_option("--preferences", prefs_path,
                    "preference program file (overrides the document)");
  solve->add_option("--limit", limit, "largest universe to enumerate (2^n)");

  app.add_flag("--verbose", verbose, "report statistics to standard error");
  for (auto* sub : app.get_subcommands(nullptr)) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kRejected;
  }

  if (*check) return cmd_check(doc_path);
  if (*check_solution) return cmd_check_solution(doc_path, sol_path);
  if (*eval) return cmd_eval(doc_path, sol_path, prefs_path);
  if (*typecheck) return cmd_typecheck(prog_path, doc_path, stdlib);
  if (*pe) return cmd_pe(doc_path, prog_path, out_doc_path, out_prog_path);
  if (*solve) return cmd_solve(doc_path, prefs_path, limit, verbose);
  return kRejected;
}

}  // namespace cudfmoo
