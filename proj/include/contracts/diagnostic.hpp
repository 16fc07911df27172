#pragma once

#include <optional>
#include <string>
#include <vector>

#include "contracts/model.hpp"

namespace contracts {

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  Span span;
  std::string message;
  std::string code;
  int source = -1;  // index of the originating document, when known
};

inline Diagnostic error_at(Span s, std::string code, std::string msg) {
  return {Severity::Error, s, std::move(msg), std::move(code)};
}
inline Diagnostic warning_at(Span s, std::string code, std::string msg) {
  return {Severity::Warning, s, std::move(msg), std::move(code)};
}

// file:line:col: error[CODE]: message
std::string format_diagnostic(const Diagnostic& d, const std::string& file);

bool has_errors(const std::vector<Diagnostic>& ds);

// Stable ordering by position, then code.
void sort_diagnostics(std::vector<Diagnostic>& ds);

template <class T>
struct Result {
  std::optional<T> value;
  std::vector<Diagnostic> diags;

  bool ok() const { return value.has_value() && !has_errors(diags); }
};

}  // namespace contracts
