#pragma once

#include <vector>

#include "minivc/ast.hpp"
#include "minivc/diag.hpp"

namespace minivc {

struct ParseResult {
  Program program;
  std::vector<Diagnostic> diagnostics;

  bool ok() const {
    for (const auto &d : diagnostics)
      if (d.severity == Severity::Error)
        return false;
    return true;
  }
};

/// Parses source text into a span-annotated AST. Parsing continues past a
/// failed declaration when possible; all errors are collected.
ParseResult parse(const std::string &text, const std::string &file);

/// Parses a single expression (test helper).
ExprPtr parse_expression(const std::string &text,
                         std::vector<Diagnostic> *diags = nullptr);

} // namespace minivc
