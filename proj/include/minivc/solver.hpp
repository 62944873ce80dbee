#pragma once

#include <string>
#include <utility>
#include <vector>

namespace minivc {

/// Raw result of one solver subprocess run.
struct SolverOutput {
  bool spawnFailed = false; // could not start the solver at all
  bool timedOut = false;    // killed at the hard deadline
  int exitCode = 0;
  std::string out;
  std::string err;
};

/// Runs `<path> -in` with `input` on stdin and collects stdout/stderr.
/// The process is killed (and timedOut set) after `hardTimeoutMs`.
SolverOutput run_solver(const std::string &path, const std::string &input,
                        int hardTimeoutMs);

enum class Verdict { Proved, Refuted, Unknown, Timeout, Error };

struct QueryResult {
  Verdict verdict = Verdict::Error;
  /// Constant assignments from the countermodel, when sat.
  std::vector<std::pair<std::string, std::string>> model;
};

/// Splits a batched solver transcript into per-query results. The input
/// script issued `expected` (check-sat)(get-model) pairs; verdict lines are
/// sat/unsat/unknown, each sat followed by a model, and (error ...) lines
/// after unsat answers (no model available) are skipped.
std::vector<QueryResult> parse_solver_output(const std::string &text,
                                             size_t expected);

} // namespace minivc
