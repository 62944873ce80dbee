#include "minivc/diag.hpp"

#include <array>
#include <tuple>

namespace minivc {

namespace {
struct KindName {
  DiagKind kind;
  const char *name;
};

constexpr std::array<KindName, 24> kKindNames{{
    {DiagKind::Syntax, "syntax"},
    {DiagKind::Resolve, "resolve"},
    {DiagKind::TypeError, "type-error"},
    {DiagKind::GhostFlow, "ghost-flow"},
    {DiagKind::ReadsViolation, "insufficient-reads"},
    {DiagKind::ModifiesViolation, "modifies-violation"},
    {DiagKind::DefiniteAssignment, "definite-assignment"},
    {DiagKind::PreconditionAtCall, "precondition-at-call"},
    {DiagKind::Postcondition, "postcondition"},
    {DiagKind::InvariantEntry, "invariant-entry"},
    {DiagKind::InvariantMaintenance, "invariant-maintenance"},
    {DiagKind::Assertion, "assertion"},
    {DiagKind::IndexBounds, "index-bounds"},
    {DiagKind::NullDeref, "null-deref"},
    {DiagKind::Division, "division"},
    {DiagKind::FunctionPrecondition, "function-precondition"},
    {DiagKind::DecreasesDecrease, "decreases-decrease"},
    {DiagKind::DecreasesBounded, "decreases-bounded"},
    {DiagKind::CalcStep, "calc-step"},
    {DiagKind::FramePostcondition, "frame-postcondition"},
    {DiagKind::TerminationMetricMissing, "termination-metric-missing"},
    {DiagKind::AssumedLemma, "assumed-lemma"},
    {DiagKind::SolverIssue, "solver-issue"},
    {DiagKind::Io, "io"},
}};
} // namespace

const char *diag_kind_name(DiagKind k) {
  for (const auto &e : kKindNames)
    if (e.kind == k)
      return e.name;
  return "unknown";
}

std::optional<DiagKind> diag_kind_from_name(const std::string &name) {
  for (const auto &e : kKindNames)
    if (name == e.name)
      return e.kind;
  return std::nullopt;
}

bool diag_less(const Diagnostic &a, const Diagnostic &b) {
  return std::tie(a.span.file, a.span.line, a.span.col, a.kind) <
         std::tie(b.span.file, b.span.line, b.span.col, b.kind);
}

std::string format_diagnostic(const Diagnostic &d) {
  const char *sev = d.severity == Severity::Error     ? "error"
                    : d.severity == Severity::Warning ? "warning"
                                                      : "info";
  std::string out = d.span.str() + ": " + sev + ": " + diag_kind_name(d.kind) +
                    ": " + d.message;
  if (!d.bindings.empty()) {
    out += " [";
    bool first = true;
    for (const auto &[k, v] : d.bindings) {
      if (!first)
        out += ", ";
      first = false;
      out += k + " = " + v;
    }
    out += "]";
  }
  return out;
}

} // namespace minivc
