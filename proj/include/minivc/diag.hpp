#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "minivc/source.hpp"

namespace minivc {

enum class Severity { Error, Warning, Info };

/// Classification shared by obligations and front-end diagnostics.
/// The front-end kinds come first; the rest mirror verification
/// obligation kinds.
enum class DiagKind {
  Syntax,
  Resolve,
  TypeError,
  GhostFlow,
  ReadsViolation,
  ModifiesViolation,
  DefiniteAssignment,
  PreconditionAtCall,
  Postcondition,
  InvariantEntry,
  InvariantMaintenance,
  Assertion,
  IndexBounds,
  NullDeref,
  Division,
  FunctionPrecondition,
  DecreasesDecrease,
  DecreasesBounded,
  CalcStep,
  FramePostcondition,
  TerminationMetricMissing,
  AssumedLemma,
  SolverIssue,
  Io,
};

const char *diag_kind_name(DiagKind k);
std::optional<DiagKind> diag_kind_from_name(const std::string &name);

struct Diagnostic {
  SourceSpan span;
  Severity severity = Severity::Error;
  DiagKind kind = DiagKind::Syntax;
  std::string message;
  /// Counterexample bindings (variable -> printed value), when a solver
  /// produced a model for the failing obligation.
  std::vector<std::pair<std::string, std::string>> bindings;
  /// Human label of the originating obligation, if any.
  std::string label;
};

/// Stable ordering: file, line, col, kind.
bool diag_less(const Diagnostic &a, const Diagnostic &b);

std::string format_diagnostic(const Diagnostic &d);

} // namespace minivc
