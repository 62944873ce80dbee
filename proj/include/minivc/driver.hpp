#pragma once

#include <string>
#include <vector>

#include "minivc/diag.hpp"

namespace minivc {

struct VerifyOptions {
  int fuel = 2;
  double timeoutSec = 10.0; // per-obligation solver budget
  int workers = 0;          // 0 = hardware concurrency
  std::string solverPath;   // empty -> $MINIVC_SOLVER
  bool json = false;
  bool showDecreases = false;
  std::string dumpSmtDir; // empty = no dump
};

struct DeclSummary {
  std::string name;
  int total = 0, proved = 0, failed = 0, unknown = 0;
  bool bodiless = false;
  long long wallMs = 0;
};

struct VerifyResult {
  /// 0 verified; 1 verification errors or incomplete; 2 parse/resolve
  /// errors; 3 I/O or solver-configuration errors.
  int exitCode = 3;
  std::string verdict; // "verified" | "incomplete" | "errors"
  std::vector<Diagnostic> diagnostics; // sorted by diag_less
  std::vector<DeclSummary> decls;
  std::vector<std::string> metricLines; // --show-decreases report lines
  int assumedLemmas = 0;
  std::string jsonReport; // single JSON document, schema 1
};

VerifyResult verify_file(const std::string &path, const VerifyOptions &opt);

/// Runs a compiled method with contract checking; prints outputs or a fault.
int run_method(const std::string &path, const std::string &method,
               const std::vector<std::string> &args);

/// Verifies every file listed in the manifest and compares verdicts and
/// pinned (kind, line) diagnostics. Returns 0 iff everything matches.
int run_corpus(const std::string &dir, const std::string &manifestPath,
               const VerifyOptions &opt);

} // namespace minivc
