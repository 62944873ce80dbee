// End-to-end acceptance checks over the bundled corpus. Prints one PASS/FAIL
// line per criterion and exits nonzero if any criterion fails.
//
//   1  positive corpus verifies
//   2  negative corpus fails with the expected diagnostic kind and line
//   3  guessed termination metrics match the expected expressions
//   4  verified methods agree with the reference interpreter on sweeps
//   5  runtime-checked execution of the positive corpus raises no faults
//   6  property suites (calc steps, lexicographic order, fuel and assume
//      monotonicity, parse/pretty round-trip)
//   7  countermodels of quantifier-free refutations are genuine

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "minivc/driver.hpp"
#include "minivc/interp.hpp"
#include "minivc/parser.hpp"
#include "minivc/pretty.hpp"
#include "minivc/resolver.hpp"
#include "minivc/simplify.hpp"
#include "minivc/smtlower.hpp"
#include "minivc/solver.hpp"
#include "minivc/termination.hpp"
#include "minivc/vcgen.hpp"

using namespace minivc;
namespace fs = std::filesystem;

namespace {

std::string g_corpus = "corpus";
int g_failures = 0;

void report(int criterion, bool ok, const std::string &what,
            const std::string &detail = "") {
  std::cout << "criterion " << criterion << " (" << what
            << "): " << (ok ? "PASS" : "FAIL");
  if (!ok && !detail.empty())
    std::cout << " — " << detail;
  std::cout << "\n";
  if (!ok)
    ++g_failures;
}

std::string path(const std::string &file) {
  return (fs::path(g_corpus) / file).string();
}

std::optional<ResolvedProgram> load(const std::string &file,
                                    std::string &err) {
  std::ifstream in(path(file));
  if (!in) {
    err = "cannot read " + file;
    return std::nullopt;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  ParseResult pr = parse(ss.str(), file);
  if (!pr.ok()) {
    err = "parse errors in " + file;
    return std::nullopt;
  }
  ResolvedProgram rp = resolve(std::move(pr.program));
  if (!rp.ok()) {
    err = "resolve errors in " + file;
    return std::nullopt;
  }
  return rp;
}

const std::vector<std::string> kPositive = {
    "factorial_final.dfy",   "factorial_modular.dfy",
    "compute5f_calc.dfy",    "compute5f_simplified.dfy",
    "bubblesort_final.dfy",  "create_array.dfy",
    "mutual_recursion.dfy"};

struct Pin {
  std::string file;
  std::string kind;
  int line;
};

const std::vector<Pin> kNegative = {
    {"factorial_broken_entry.dfy", "invariant-entry", 15},
    {"factorial_no_requires.dfy", "function-precondition", 3},
    {"factorial_modular_broken.dfy", "decreases-decrease", 23},
    {"compute5f_no_lemmas.dfy", "invariant-maintenance", 20},
    {"compute5f_no_lemmas.dfy", "postcondition", 15},
    {"bubblestep_bad_invariant.dfy", "index-bounds", 16},
    {"mutual_recursion_no_tuple.dfy", "decreases-decrease", 9},
    {"mutual_recursion_no_tuple.dfy", "decreases-decrease", 10},
    {"create_array_no_ghost.dfy", "decreases-decrease", 6}};

std::vector<std::string> corpusFiles() {
  std::vector<std::string> files;
  for (const auto &e : fs::directory_iterator(g_corpus))
    if (e.path().extension() == ".dfy")
      files.push_back(e.path().filename().string());
  std::sort(files.begin(), files.end());
  return files;
}

// (file, kind, line) triples of error diagnostics, for monotonicity checks
std::set<std::tuple<std::string, std::string, int>>
errorSet(const VerifyResult &r) {
  std::set<std::tuple<std::string, std::string, int>> s;
  for (const auto &d : r.diagnostics)
    if (d.severity == Severity::Error)
      s.insert({d.span.file, std::string(diag_kind_name(d.kind)),
                d.span.line});
  return s;
}

ExprPtr intLit(int64_t v) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::IntLit;
  e->intVal = v;
  e->type = Type::intType();
  return e;
}

ExprPtr mkNot(ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Unary;
  e->uop = UnOp::Not;
  e->args = {std::move(a)};
  e->type = Type::boolType();
  return e;
}

std::optional<int64_t> parseModelInt(const std::string &s) {
  std::string t = s;
  bool neg = false;
  if (t.size() > 4 && t.front() == '(' && t.back() == ')') {
    // "(- 3)"
    t = t.substr(1, t.size() - 2);
    if (t.substr(0, 2) != "- ")
      return std::nullopt;
    t = t.substr(2);
    neg = true;
  }
  if (!t.empty() && t[0] == '-') {
    t = t.substr(1);
    neg = true;
  }
  if (t.empty() ||
      !std::all_of(t.begin(), t.end(), [](char c) { return isdigit(c); }))
    return std::nullopt;
  int64_t v = std::stoll(t);
  return neg ? -v : v;
}

// ---------------------------------------------------------------------------

void criterion1and2(std::map<std::string, VerifyResult> &fuel2) {
  VerifyOptions opt; // defaults: fuel 2, solver from MINIVC_SOLVER
  for (const auto &f : corpusFiles())
    fuel2.emplace(f, verify_file(path(f), opt));

  std::string bad;
  for (const auto &f : kPositive)
    if (fuel2.at(f).exitCode != 0)
      bad += (bad.empty() ? "" : ", ") + f + " did not verify";
  report(1, bad.empty(), "positive corpus verifies", bad);

  bad.clear();
  for (const auto &p : kNegative) {
    const VerifyResult &r = fuel2.at(p.file);
    bool found = r.exitCode == 1;
    if (found) {
      found = false;
      for (const auto &d : r.diagnostics)
        found = found || (d.severity == Severity::Error &&
                          diag_kind_name(d.kind) == p.kind &&
                          d.span.line == p.line);
    }
    if (!found)
      bad += (bad.empty() ? "" : ", ") + p.file + " missing " + p.kind +
             " at line " + std::to_string(p.line);
  }
  report(2, bad.empty(), "negative corpus pinned diagnostics", bad);
}

void criterion3() {
  // (file, expected guessed metric) pairs; compared after pretty-printing
  const std::vector<std::pair<std::string, std::string>> sites = {
      {"factorial_final.dfy", "n"},
      {"factorial_final.dfy", "n - 1 - i"},
      {"compute5f_calc.dfy", "k - i"},
      {"bubblesort_final.dfy", "a.Length - i"},
      {"bubblesort_final.dfy", "j - 0"}};
  std::string bad;
  for (const auto &[file, want] : sites) {
    std::string err;
    auto rp = load(file, err);
    if (!rp) {
      bad += (bad.empty() ? "" : ", ") + err;
      continue;
    }
    auto vc = generate_vcs(*rp);
    bool found = false;
    for (const auto &d : vc.decls)
      for (const auto &mi : d.metrics)
        if (mi.guessed && mi.metric.size() == 1 &&
            pretty_print(mi.metric[0]) == want)
          found = true;
    if (!found)
      bad += (bad.empty() ? "" : ", ") + file + " lacks guessed metric '" +
             want + "'";
  }
  report(3, bad.empty(), "guessed termination metrics", bad);
}

void criterion4() {
  std::string bad, err;

  // factorial: computeFactorial(n) == n! for n in 0..10
  if (auto rp = load("factorial_final.dfy", err)) {
    Interp in(*rp, /*checkContracts=*/true);
    int64_t fact = 1;
    for (int n = 0; n <= 10; ++n) {
      if (n > 0)
        fact *= n;
      auto r = in.runMethod("computeFactorial", {Value::mkInt(n)});
      if (r.fault || r.outs.size() != 1 || r.outs[0] != Value::mkInt(fact)) {
        bad += "computeFactorial(" + std::to_string(n) + ") wrong; ";
        break;
      }
    }
  } else
    bad += err + "; ";

  // compute5f(k) == 5 * f(k) for k in 1..8
  if (auto rp = load("compute5f_calc.dfy", err)) {
    Interp in(*rp, true);
    for (int k = 1; k <= 8; ++k) {
      auto fk = in.evalCall("f", {Value::mkInt(k)});
      auto r = in.runMethod("compute5f", {Value::mkInt(k)});
      if (!fk || r.fault || r.outs.size() != 1 ||
          r.outs[0] != Value::mkInt(5 * fk->i)) {
        bad += "compute5f(" + std::to_string(k) + ") != 5*f(k); ";
        break;
      }
    }
  } else
    bad += err + "; ";

  // bubbleSort: output sorted and a permutation of the input — exhaustive
  // over length <= 6 with 4 element values, plus 500 random arrays
  if (auto rp = load("bubblesort_final.dfy", err)) {
    Interp in(*rp, true);
    auto check = [&](const std::vector<int64_t> &xs) -> bool {
      std::vector<Value> elems;
      for (int64_t x : xs)
        elems.push_back(Value::mkInt(x));
      Value arr = Value::mkArray(elems);
      auto store = arr.arr; // reference identity: sorted in place
      auto r = in.runMethod("bubbleSort", {arr});
      if (r.fault)
        return false;
      std::vector<int64_t> got;
      for (const auto &v : *store)
        got.push_back(v.i);
      std::vector<int64_t> want = xs;
      std::sort(want.begin(), want.end());
      return got == want;
    };
    const int64_t vals[4] = {-2, 0, 3, 7};
    bool ok = true;
    for (int len = 0; len <= 6 && ok; ++len) {
      std::vector<int64_t> xs(len);
      int64_t combos = 1;
      for (int i = 0; i < len; ++i)
        combos *= 4;
      for (int64_t c = 0; c < combos && ok; ++c) {
        int64_t t = c;
        for (int i = 0; i < len; ++i, t /= 4)
          xs[i] = vals[t % 4];
        ok = check(xs);
      }
    }
    std::mt19937 rng(20260826);
    for (int t = 0; t < 500 && ok; ++t) {
      std::vector<int64_t> xs(rng() % 7);
      for (auto &x : xs)
        x = (int64_t)(rng() % 29) - 14;
      ok = check(xs);
    }
    if (!ok)
      bad += "bubbleSort oracle mismatch; ";
  } else
    bad += err + "; ";

  report(4, bad.empty(), "interpreter oracle sweeps", bad);
}

void criterion5() {
  std::string bad;
  long long runs = 0;
  std::mt19937 rng(7);
  for (const auto &file : kPositive) {
    std::string err;
    auto rp = load(file, err);
    if (!rp) {
      bad += err + "; ";
      continue;
    }
    Interp in(*rp, /*checkContracts=*/true);
    for (const auto &[name, m] : rp->methods) {
      if (!m->body)
        continue;
      // argument domains: ints -3..10; arrays sampled up to length 6
      std::vector<std::vector<Value>> domains;
      bool supported = true;
      for (const auto &p : m->ins) {
        std::vector<Value> d;
        if (p.type->kind == TypeKind::Int) {
          for (int v = -3; v <= 10; ++v)
            d.push_back(Value::mkInt(v));
        } else if (p.type->kind == TypeKind::Array &&
                   p.type->args[0]->kind == TypeKind::Int) {
          for (int len = 0; len <= 6; ++len)
            for (int rep = 0; rep < 8; ++rep) {
              std::vector<Value> xs(len);
              for (auto &x : xs)
                x = Value::mkInt((int64_t)(rng() % 14) - 3);
              if (rep == 0)
                std::sort(xs.begin(), xs.end(),
                          [](const Value &a, const Value &b) { return a < b; });
              d.push_back(Value::mkArray(xs));
            }
        } else {
          supported = false; // datatype / generic parameters: out of domain
        }
        domains.push_back(std::move(d));
      }
      if (!supported || domains.size() > 3)
        continue;
      std::vector<size_t> idx(domains.size(), 0);
      bool done = domains.empty() ? false : true;
      // iterate the cross product (a single run when there are no params)
      std::vector<Value> args;
      auto runOnce = [&](const std::vector<Value> &a) {
        ++runs;
        auto r = in.runMethod(name, a);
        if (r.fault && r.fault->kind != RuntimeFault::Kind::Precondition)
          bad += name + " faulted: " + r.fault->message + "; ";
        return !r.fault || r.fault->kind == RuntimeFault::Kind::Precondition;
      };
      if (domains.empty()) {
        if (!runOnce({}))
          break;
        continue;
      }
      while (done) {
        args.clear();
        for (size_t i = 0; i < idx.size(); ++i)
          args.push_back(domains[i][idx[i]]);
        if (!runOnce(args))
          break;
        size_t i = 0;
        for (; i < idx.size(); ++i) {
          if (++idx[i] < domains[i].size())
            break;
          idx[i] = 0;
        }
        done = i < idx.size();
      }
      if (!bad.empty())
        break;
    }
    if (!bad.empty())
      break;
  }
  report(5, bad.empty(),
         "runtime-checked sweep (" + std::to_string(runs) + " runs)", bad);
}

void criterion6(const std::map<std::string, VerifyResult> &fuel2) {
  std::string bad, err;

  // (a) the detailed calc proof produces exactly 4 step obligations
  if (auto rp = load("compute5f_calc.dfy", err)) {
    auto vc = generate_vcs(*rp);
    int steps = 0;
    for (const auto &d : vc.decls)
      if (d.name == "DivBy5_Lemma")
        for (const auto &ob : d.obligations)
          steps += ob.kind == DiagKind::CalcStep;
    if (steps != 4)
      bad += "calc steps = " + std::to_string(steps) + " (want 4); ";
  } else
    bad += err + "; ";

  // (b) lex_less agrees with a brute-force lexicographic check
  {
    ParseResult pr = parse("", "empty.dfy");
    ResolvedProgram empty = resolve(std::move(pr.program));
    Interp in(empty);
    std::mt19937 rng(42);
    for (int t = 0; t < 1000; ++t) {
      size_t len = 1 + rng() % 3;
      std::vector<int64_t> a(len), b(len);
      for (auto &x : a)
        x = (int64_t)(rng() % 11) - 5;
      for (auto &x : b)
        x = (int64_t)(rng() % 11) - 5;
      std::vector<ExprPtr> newM, oldM;
      std::vector<TypePtr> types;
      for (size_t i = 0; i < len; ++i) {
        newM.push_back(intLit(a[i]));
        oldM.push_back(intLit(b[i]));
        types.push_back(Type::intType());
      }
      auto got = in.evalClosed(lex_less(newM, oldM, types));
      // reference: strict bounded decrease at the first differing position
      bool want = false;
      for (size_t i = 0; i < len; ++i) {
        if (a[i] == b[i])
          continue;
        want = a[i] < b[i] && b[i] >= 0;
        break;
      }
      if (!got || got->k != Value::K::Bool || (got->i != 0) != want) {
        bad += "lex_less mismatch on case " + std::to_string(t) + "; ";
        break;
      }
    }
  }

  // (c) fuel monotonicity: errors never appear when fuel increases
  {
    std::map<int, std::set<std::tuple<std::string, std::string, int>>> errs;
    for (const auto &[f, r] : fuel2)
      for (const auto &e : errorSet(r))
        errs[2].insert(e);
    for (int fuel : {1, 3}) {
      VerifyOptions opt;
      opt.fuel = fuel;
      for (const auto &f : corpusFiles())
        for (const auto &e : errorSet(verify_file(path(f), opt)))
          errs[fuel].insert(e);
    }
    auto subset = [&](int hi, int lo) {
      for (const auto &e : errs[hi])
        if (!errs[lo].count(e))
          return false;
      return true;
    };
    if (!subset(2, 1) || !subset(3, 2))
      bad += "error set grew with more fuel; ";
  }

  // (d) assume-weakening: replacing proofs by assumes removes errors
  {
    bool baselineFails = !errorSet(fuel2.at("compute5f_no_lemmas.dfy")).empty();
    bool invOk = errorSet(fuel2.at("compute5f_assume_inv.dfy")).empty() &&
                 fuel2.at("compute5f_assume_inv.dfy").verdict == "incomplete";
    bool hintOk = errorSet(fuel2.at("compute5f_assume_hint.dfy")).empty() &&
                  fuel2.at("compute5f_assume_hint.dfy").verdict == "incomplete";
    if (!baselineFails || !invOk || !hintOk)
      bad += "assume-weakening monotonicity violated; ";
  }

  // (e) parse / pretty-print round-trip on every corpus file
  for (const auto &f : corpusFiles()) {
    std::ifstream in(path(f));
    std::ostringstream ss;
    ss << in.rdbuf();
    ParseResult one = parse(ss.str(), f);
    if (!one.ok()) {
      bad += f + " does not parse; ";
      continue;
    }
    std::string printed = pretty_print(one.program);
    ParseResult two = parse(printed, f);
    if (!two.ok() || !program_equal(one.program, two.program) ||
        pretty_print(two.program) != printed) {
      bad += f + " round-trip mismatch; ";
    }
  }

  report(6, bad.empty(), "property suites", bad);
}

void criterion7() {
  const char *solver = std::getenv("MINIVC_SOLVER");
  if (!solver || !*solver) {
    report(7, false, "countermodel genuineness", "MINIVC_SOLVER not set");
    return;
  }
  std::string bad;
  int checked = 0, skipped = 0;
  for (const auto &file : corpusFiles()) {
    std::string err;
    auto rp = load(file, err);
    if (!rp)
      continue; // parse/resolve failures carry no solver obligations
    auto vc = generate_vcs(*rp);
    SmtLowering lowering(*rp, 2);
    Interp in(*rp, /*checkContracts=*/false);
    for (const auto &d : vc.decls) {
      std::vector<Obligation> pending;
      std::vector<SmtQuery> queries;
      for (const auto &ob : d.obligations) {
        Obligation s = simplify_obligation(*rp, ob);
        if (s.goal->kind == ExprKind::BoolLit && s.goal->boolVal)
          continue;
        queries.push_back(lowering.lower(s));
        pending.push_back(std::move(s));
      }
      if (pending.empty())
        continue;
      std::ostringstream script;
      script << lowering.preamble() << "(set-option :timeout 10000)\n";
      for (const auto &q : queries)
        script << "(push 1)\n" << q.text << "(pop 1)\n";
      SolverOutput out =
          run_solver(solver, script.str(), 10000 + 10000 * (int)queries.size());
      if (out.spawnFailed) {
        bad += "cannot run solver; ";
        break;
      }
      auto results = parse_solver_output(out.out, queries.size());
      for (size_t q = 0; q < queries.size(); ++q) {
        if (results[q].verdict != Verdict::Refuted || queries[q].quantified)
          continue;
        // substitute the model bindings for the query's free variables and
        // evaluate hyps && !goal; variables the solver left out are
        // don't-cares, so any completion works
        std::map<std::string, ExprPtr> su;
        bool usable = true;
        for (const auto &name : queries[q].freeVars) {
          ExprPtr lit = intLit(0);
          for (const auto &[mn, val] : results[q].model)
            if (mn == name) {
              if (val == "true" || val == "false") {
                auto b = std::make_shared<Expr>();
                b->kind = ExprKind::BoolLit;
                b->boolVal = val == "true";
                b->type = Type::boolType();
                lit = b;
              } else if (auto iv = parseModelInt(val))
                lit = intLit(*iv);
              else
                usable = false;
            }
          su.emplace(name, lit);
        }
        if (!usable) {
          ++skipped;
          continue;
        }
        bool allTrue = true, evaluable = true;
        for (const auto &h : pending[q].hypotheses) {
          auto v = in.evalClosed(subst_vars(h, su));
          if (!v || v->k != Value::K::Bool)
            evaluable = false;
          else
            allTrue = allTrue && v->i != 0;
        }
        auto g =
            in.evalClosed(subst_vars(mkNot(pending[q].goal), su));
        if (!g || g->k != Value::K::Bool)
          evaluable = false;
        else
          allTrue = allTrue && g->i != 0;
        if (!evaluable) {
          ++skipped; // heap operations are outside the closed evaluator
          continue;
        }
        ++checked;
        if (!allTrue)
          bad += file + " " + d.name + ": spurious countermodel; ";
      }
    }
  }
  if (checked == 0)
    bad += "no quantifier-free refutation was checkable; ";
  report(7, bad.empty(),
         "countermodel genuineness (" + std::to_string(checked) +
             " checked, " + std::to_string(skipped) + " skipped)",
         bad);
}

} // namespace

int main(int argc, char **argv) {
  if (argc > 1)
    g_corpus = argv[1];
  std::map<std::string, VerifyResult> fuel2;
  criterion1and2(fuel2);
  criterion3();
  criterion4();
  criterion5();
  criterion6(fuel2);
  criterion7();
  if (g_failures) {
    std::cout << g_failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all acceptance criteria passed\n";
  return 0;
}
