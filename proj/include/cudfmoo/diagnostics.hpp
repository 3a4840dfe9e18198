#pragma once

#include <optional>
#include <string>
#include <vector>

namespace cudfmoo {

struct ParseDiagnostic {
  enum class Severity { error, warning };
  int line = 0;    // 1-based, 0 when unknown
  int column = 0;  // 1-based, 0 when unknown
  std::string message;
  Severity severity = Severity::error;

  std::string to_string() const;
};

// Outcome of an operation that either yields a value or a list of
// diagnostics.  Warnings may accompany a successful result.
template <class T>
struct Result {
  std::optional<T> value;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const { return value.has_value(); }
  const T& operator*() const { return *value; }
  T& operator*() { return *value; }
  const T* operator->() const { return &*value; }
  T* operator->() { return &*value; }

  static Result success(T v) { return Result{std::move(v), {}}; }
  static Result failure(std::vector<ParseDiagnostic> ds) {
    return Result{std::nullopt, std::move(ds)};
  }
  static Result failure(std::string message, int line = 0, int column = 0) {
    return failure({ParseDiagnostic{line, column, std::move(message),
                                    ParseDiagnostic::Severity::error}});
  }
};

}  // namespace cudfmoo
