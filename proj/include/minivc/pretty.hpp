#pragma once

#include <string>

#include "minivc/ast.hpp"

namespace minivc {

/// Renders AST fragments back to concrete syntax. The output of
/// pretty_print(program) re-parses to a structurally equal program.
std::string pretty_print(const ExprPtr &e);
std::string pretty_print(const StmtPtr &s, int indent = 0);
std::string pretty_print(const Declaration &d);
std::string pretty_print(const Program &p);

/// Structural equality modulo spans (round-trip checks).
bool expr_equal(const ExprPtr &a, const ExprPtr &b);
bool stmt_equal(const StmtPtr &a, const StmtPtr &b);
bool program_equal(const Program &a, const Program &b);

} // namespace minivc
