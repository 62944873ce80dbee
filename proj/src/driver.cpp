#include "minivc/driver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "minivc/interp.hpp"
#include "minivc/parser.hpp"
#include "minivc/pretty.hpp"
#include "minivc/resolver.hpp"
#include "minivc/simplify.hpp"
#include "minivc/smtlower.hpp"
#include "minivc/solver.hpp"
#include "minivc/vcgen.hpp"

namespace minivc {

namespace {

std::optional<std::string> readFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void countAssumes(const std::vector<StmtPtr> &stmts, int &n,
                  std::vector<Diagnostic> &diags) {
  for (const auto &s : stmts) {
    if (s->kind == StmtKind::Assume) {
      ++n;
      diags.push_back({s->span, Severity::Warning, DiagKind::AssumedLemma,
                       "explicit assume statement; verification is incomplete",
                       {},
                       ""});
    }
    countAssumes(s->body, n, diags);
    countAssumes(s->elseBody, n, diags);
    for (const auto &c : s->cases)
      countAssumes(c.body, n, diags);
    for (const auto &h : s->calcHints)
      countAssumes(h, n, diags);
  }
}

nlohmann::json diagJson(const Diagnostic &d) {
  nlohmann::json j;
  j["file"] = d.span.file;
  j["line"] = d.span.line;
  j["col"] = d.span.col;
  j["severity"] = d.severity == Severity::Error     ? "error"
                  : d.severity == Severity::Warning ? "warning"
                                                    : "info";
  j["kind"] = diag_kind_name(d.kind);
  j["message"] = d.message;
  if (!d.label.empty())
    j["label"] = d.label;
  if (!d.bindings.empty()) {
    nlohmann::json b = nlohmann::json::object();
    for (const auto &[k, v] : d.bindings)
      b[k] = v;
    j["bindings"] = b;
  }
  return j;
}

void attachJson(VerifyResult &res, const std::string &path) {
  nlohmann::json j;
  j["schema"] = 1;
  j["file"] = path;
  j["verdict"] = res.verdict;
  j["assumedLemmas"] = res.assumedLemmas;
  j["decls"] = nlohmann::json::array();
  for (const auto &ds : res.decls) {
    nlohmann::json dj;
    dj["name"] = ds.name;
    dj["obligations"] = {{"total", ds.total},
                         {"proved", ds.proved},
                         {"failed", ds.failed},
                         {"unknown", ds.unknown}};
    dj["bodiless"] = ds.bodiless;
    dj["wallMs"] = ds.wallMs;
    j["decls"].push_back(dj);
  }
  j["metrics"] = res.metricLines;
  j["diagnostics"] = nlohmann::json::array();
  for (const auto &d : res.diagnostics)
    j["diagnostics"].push_back(diagJson(d));
  res.jsonReport = j.dump(2);
}

struct DeclWork {
  const DeclVCs *decl = nullptr;
  std::vector<Obligation> simplified; // same order as decl->obligations
  std::vector<size_t> pending;        // indices still needing the solver
  std::vector<SmtQuery> queries;      // parallel to pending
  std::vector<QueryResult> results;   // parallel to pending
  bool solverTimedOut = false;
  bool solverFailed = false;
  long long wallMs = 0;
};

} // namespace

VerifyResult verify_file(const std::string &path, const VerifyOptions &opt) {
  VerifyResult res;
  auto fail = [&](int code, DiagKind kind, const std::string &msg) {
    res.exitCode = code;
    res.verdict = "errors";
    res.diagnostics.push_back(
        {SourceSpan{path, 1, 1, 0}, Severity::Error, kind, msg, {}, ""});
    attachJson(res, path);
    return res;
  };

  auto text = readFile(path);
  if (!text)
    return fail(3, DiagKind::Io, "cannot read file");

  auto pr = parse(*text, path);
  if (!pr.diagnostics.empty()) {
    res.exitCode = 2;
    res.verdict = "errors";
    res.diagnostics = pr.diagnostics;
    std::sort(res.diagnostics.begin(), res.diagnostics.end(), diag_less);
    attachJson(res, path);
    return res;
  }
  auto rp = resolve(std::move(pr.program));
  res.diagnostics = rp.diagnostics;
  if (!rp.ok()) {
    res.exitCode = 2;
    res.verdict = "errors";
    std::sort(res.diagnostics.begin(), res.diagnostics.end(), diag_less);
    attachJson(res, path);
    return res;
  }

  auto vc = generate_vcs(rp);
  for (const auto &d : vc.diagnostics)
    res.diagnostics.push_back(d);

  int assumes = 0;
  for (const auto &[n, m] : rp.methods)
    if (m->body)
      countAssumes(*m->body, assumes, res.diagnostics);
  res.assumedLemmas = assumes;

  bool bodilessSeen = false;
  for (const auto &d : vc.decls)
    bodilessSeen = bodilessSeen || d.bodiless;

  for (const auto &d : vc.decls)
    for (const auto &mi : d.metrics) {
      std::string line = mi.span.file + ":" + std::to_string(mi.span.line) +
                         ": decreases ";
      for (size_t i = 0; i < mi.metric.size(); ++i)
        line += (i ? ", " : "") + pretty_print(mi.metric[i]);
      line += mi.guessed ? " (guessed)" : "";
      res.metricLines.push_back(line);
    }

  bool vcError = !vc.ok(); // e.g. no termination metric could be guessed

  // Simplify; anything left goes to the solver, batched per declaration.
  std::vector<DeclWork> work(vc.decls.size());
  std::string solverPath = opt.solverPath;
  if (solverPath.empty())
    if (const char *env = std::getenv("MINIVC_SOLVER"))
      solverPath = env;

  SmtLowering lowering(rp, opt.fuel);
  bool needSolver = false;
  for (size_t i = 0; i < vc.decls.size(); ++i) {
    work[i].decl = &vc.decls[i];
    for (size_t k = 0; k < vc.decls[i].obligations.size(); ++k) {
      Obligation s = simplify_obligation(rp, vc.decls[i].obligations[k]);
      bool closed = s.goal->kind == ExprKind::BoolLit && s.goal->boolVal;
      work[i].simplified.push_back(std::move(s));
      if (!closed) {
        work[i].pending.push_back(k);
        work[i].queries.push_back(lowering.lower(work[i].simplified.back()));
        needSolver = true;
      }
    }
  }

  if (!opt.dumpSmtDir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(opt.dumpSmtDir, ec);
    if (ec)
      return fail(3, DiagKind::Io, "cannot create dump directory");
    for (const auto &w : work)
      for (size_t q = 0; q < w.pending.size(); ++q) {
        const Obligation &ob = w.simplified[w.pending[q]];
        std::string name = w.decl->name + "." + diag_kind_name(ob.kind) + "." +
                           std::to_string(q) + ".smt2";
        std::ofstream out(std::filesystem::path(opt.dumpSmtDir) / name);
        out << lowering.preamble() << w.queries[q].text;
      }
  }

  if (needSolver && solverPath.empty())
    return fail(
        3, DiagKind::SolverIssue,
        "no SMT solver configured (use --solver-path or MINIVC_SOLVER)");

  // solve per-declaration scripts on a small worker pool
  int softMs = std::max(1, (int)(opt.timeoutSec * 1000));
  std::atomic<size_t> next{0};
  auto runOne = [&](DeclWork &w) {
    if (w.pending.empty())
      return;
    auto start = std::chrono::steady_clock::now();
    std::ostringstream script;
    script << lowering.preamble();
    script << "(set-option :timeout " << softMs << ")\n";
    for (const auto &q : w.queries)
      script << "(push 1)\n" << q.text << "(pop 1)\n";
    int hardMs = 10000 + softMs * (int)w.queries.size();
    SolverOutput out = run_solver(solverPath, script.str(), hardMs);
    w.solverFailed = out.spawnFailed;
    w.solverTimedOut = out.timedOut;
    if (!out.spawnFailed)
      w.results = parse_solver_output(out.out, w.queries.size());
    w.wallMs = std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start)
                   .count();
  };
  unsigned hw = std::thread::hardware_concurrency();
  size_t nw = opt.workers > 0 ? (size_t)opt.workers : (hw ? hw : 2);
  nw = std::min(nw, work.size());
  std::vector<std::thread> pool;
  for (size_t t = 0; t < nw; ++t)
    pool.emplace_back([&] {
      for (size_t i = next.fetch_add(1); i < work.size();
           i = next.fetch_add(1))
        runOne(work[i]);
    });
  for (auto &t : pool)
    t.join();

  bool solverBroken = false;
  for (auto &w : work) {
    DeclSummary ds;
    ds.name = w.decl->name;
    ds.total = (int)w.decl->obligations.size();
    ds.bodiless = w.decl->bodiless;
    ds.wallMs = w.wallMs;
    ds.proved = ds.total - (int)w.pending.size();
    if (w.solverFailed) {
      solverBroken = true;
      res.decls.push_back(ds);
      continue;
    }
    for (size_t q = 0; q < w.pending.size(); ++q) {
      const Obligation &ob = w.simplified[w.pending[q]];
      const SmtQuery &query = w.queries[q];
      QueryResult r = q < w.results.size() ? w.results[q]
                                           : QueryResult{Verdict::Error, {}};
      Diagnostic d{ob.span, Severity::Error, ob.kind, "", {}, ob.label};
      switch (r.verdict) {
      case Verdict::Proved:
        ++ds.proved;
        continue;
      case Verdict::Refuted: {
        ++ds.failed;
        d.message = ob.label + (query.quantified
                                    ? ": not proved (candidate countermodel)"
                                    : ": does not hold");
        for (const auto &v : query.freeVars)
          for (const auto &[k, val] : r.model)
            if (k == v)
              d.bindings.emplace_back(k, val);
        break;
      }
      case Verdict::Unknown:
        ++ds.unknown;
        d.message =
            ob.label + ": not proved; try adding an assert or calling a lemma";
        break;
      case Verdict::Timeout:
      case Verdict::Error:
        ++ds.unknown;
        if (w.solverTimedOut)
          d.message = ob.label + ": solver timed out";
        else {
          d.kind = DiagKind::SolverIssue;
          d.message = ob.label + ": solver produced no usable answer";
        }
        break;
      }
      res.diagnostics.push_back(std::move(d));
    }
    res.decls.push_back(ds);
  }
  if (solverBroken)
    return fail(3, DiagKind::SolverIssue,
                "cannot run solver '" + solverPath + "'");

  std::sort(res.diagnostics.begin(), res.diagnostics.end(), diag_less);
  bool anyError = vcError;
  for (const auto &d : res.diagnostics)
    anyError = anyError || d.severity == Severity::Error;
  bool incomplete = assumes > 0 || bodilessSeen;
  res.verdict = anyError ? "errors" : incomplete ? "incomplete" : "verified";
  res.exitCode = (anyError || incomplete) ? 1 : 0;
  attachJson(res, path);
  return res;
}

int run_method(const std::string &path, const std::string &method,
               const std::vector<std::string> &args) {
  auto text = readFile(path);
  if (!text) {
    std::cerr << path << ": error: io: cannot read file\n";
    return 3;
  }
  auto pr = parse(*text, path);
  if (!pr.diagnostics.empty()) {
    for (const auto &d : pr.diagnostics)
      std::cerr << format_diagnostic(d) << "\n";
    return 2;
  }
  auto rp = resolve(std::move(pr.program));
  for (const auto &d : rp.diagnostics)
    std::cerr << format_diagnostic(d) << "\n";
  if (!rp.ok())
    return 2;

  std::vector<Value> vals;
  for (const auto &a : args) {
    auto v = parse_value(a);
    if (!v) {
      std::cerr << "error: cannot parse argument '" << a << "'\n";
      return 3;
    }
    vals.push_back(*v);
  }
  Interp interp(rp, /*checkContracts=*/true);
  InterpResult r = interp.runMethod(method, vals);
  if (r.fault) {
    std::cerr << r.fault->span.str() << ": runtime fault: " << r.fault->message
              << "\n";
    return 1;
  }
  for (const auto &v : r.outs)
    std::cout << v.str() << "\n";
  return 0;
}

int run_corpus(const std::string &dir, const std::string &manifestPath,
               const VerifyOptions &opt) {
  auto text = readFile(manifestPath);
  if (!text) {
    std::cerr << manifestPath << ": error: io: cannot read manifest\n";
    return 1;
  }
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(*text);
  } catch (const std::exception &e) {
    std::cerr << manifestPath << ": error: io: bad manifest: " << e.what()
              << "\n";
    return 1;
  }

  int failures = 0, total = 0;
  for (const auto &entry : manifest) {
    ++total;
    std::string file = entry.at("file").get<std::string>();
    std::string expect = entry.at("expect").get<std::string>();
    std::string full = (std::filesystem::path(dir) / file).string();
    VerifyResult r = verify_file(full, opt);

    std::vector<std::string> problems;
    int wantExit = expect == "verified" ? 0 : 1;
    if (r.exitCode != wantExit)
      problems.push_back("expected " + expect + " (exit " +
                         std::to_string(wantExit) + "), got verdict " +
                         r.verdict + " (exit " + std::to_string(r.exitCode) +
                         ")");
    if (expect == "incomplete" && r.exitCode == 1 && r.verdict != "incomplete")
      problems.push_back("expected verdict incomplete, got " + r.verdict);
    if (expect == "error" && r.exitCode == 1 && r.verdict != "errors")
      problems.push_back("expected verdict errors, got " + r.verdict);
    if (entry.contains("diagnostics"))
      for (const auto &want : entry.at("diagnostics")) {
        std::string kind = want.at("kind").get<std::string>();
        int line = want.at("line").get<int>();
        bool found = false;
        for (const auto &d : r.diagnostics)
          found = found ||
                  (diag_kind_name(d.kind) == kind && d.span.line == line &&
                   d.severity == Severity::Error);
        if (!found)
          problems.push_back("missing expected diagnostic " + kind +
                             " at line " + std::to_string(line));
      }

    if (problems.empty()) {
      std::cout << "PASS " << file << " (" << expect << ")\n";
    } else {
      ++failures;
      std::cout << "FAIL " << file << "\n";
      for (const auto &p : problems)
        std::cout << "  " << p << "\n";
      for (const auto &d : r.diagnostics)
        std::cout << "  actual: " << format_diagnostic(d) << "\n";
    }
  }
  std::cout << (total - failures) << "/" << total << " corpus files matched\n";
  return failures == 0 ? 0 : 1;
}

} // namespace minivc
