#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "minivc/parser.hpp"
#include "minivc/pretty.hpp"
#include "minivc/resolver.hpp"
#include "minivc/vcgen.hpp"

using namespace minivc;

namespace {

VcResult gen(const std::string &src) {
  ParseResult pr = parse(src, "t.dfy");
  REQUIRE(pr.ok());
  ResolvedProgram rp = resolve(std::move(pr.program));
  for (const auto &d : rp.diagnostics)
    INFO(format_diagnostic(d));
  REQUIRE(rp.ok());
  return generate_vcs(rp);
}

const DeclVCs &declOf(const VcResult &r, const std::string &name) {
  for (const auto &d : r.decls)
    if (d.name == name)
      return d;
  REQUIRE(false);
  static DeclVCs dummy;
  return dummy;
}

std::map<DiagKind, int> histogram(const DeclVCs &d) {
  std::map<DiagKind, int> h;
  for (const auto &ob : d.obligations)
    ++h[ob.kind];
  return h;
}

const Obligation &only(const DeclVCs &d, DiagKind k) {
  const Obligation *found = nullptr;
  for (const auto &ob : d.obligations)
    if (ob.kind == k) {
      REQUIRE(found == nullptr);
      found = &ob;
    }
  REQUIRE(found != nullptr);
  return *found;
}

} // namespace

TEST_CASE("assert under requires") {
  auto r = gen("method m(x: int) requires x > 0 { assert x + 1 > 1; }");
  const auto &d = declOf(r, "m");
  REQUIRE(d.obligations.size() == 1);
  const auto &ob = d.obligations[0];
  CHECK(ob.kind == DiagKind::Assertion);
  REQUIRE(ob.hypotheses.size() == 1);
  CHECK(pretty_print(ob.hypotheses[0]) == "x > 0");
  CHECK(pretty_print(ob.goal) == "x + 1 > 1");
}

TEST_CASE("assignment is substitution in the postcondition") {
  auto r = gen("method m(n: int, i: int, f0: int) returns (f: int)\n"
               "  ensures f == f0 * (n - i)\n"
               "{ f := f0 * (n - i); }");
  const auto &ob = only(declOf(r, "m"), DiagKind::Postcondition);
  CHECK(pretty_print(ob.goal) == "f0 * (n - i) == f0 * (n - i)");
}

TEST_CASE("sequenced assignments compose right to left") {
  auto r = gen("method m(n: int) returns (f: int) ensures f == n * (n - 1)\n"
               "{ var i := 1; f := n; f := f * (n - i); }");
  const auto &ob = only(declOf(r, "m"), DiagKind::Postcondition);
  CHECK(pretty_print(ob.goal) == "n * (n - 1) == n * (n - 1)");
}

TEST_CASE("recursive function: requires and decrease merge into one check") {
  auto r = gen("function factorial(n: int): int requires n >= 0\n"
               "{ if n == 0 then 1 else n * factorial(n - 1) }");
  const auto &d = declOf(r, "factorial");
  REQUIRE(d.obligations.size() == 1);
  const auto &ob = d.obligations[0];
  CHECK(ob.kind == DiagKind::FunctionPrecondition);
  REQUIRE(ob.hypotheses.size() == 2);
  CHECK(pretty_print(ob.hypotheses[0]) == "n >= 0");     // requires
  CHECK(pretty_print(ob.hypotheses[1]) == "!(n == 0)"); // else-branch path
  std::string g = pretty_print(ob.goal);
  CHECK(g.find("n - 1 >= 0") != std::string::npos); // callee requires
  CHECK(g.find("n - 1 < n") != std::string::npos);  // metric decreases
  CHECK(g.find("n >= 0") != std::string::npos);     // metric bounded
  // the guessed metric is recorded
  REQUIRE(d.metrics.size() == 1);
  CHECK(d.metrics[0].guessed);
  CHECK(pretty_print(d.metrics[0].metric[0]) == "n");
}

TEST_CASE("while loop produces entry, maintenance and decrease obligations") {
  auto r = gen("method count(n: int) returns (i: int)\n"
               "  requires n >= 0 ensures i == n\n"
               "{ i := 0; while i < n invariant 0 <= i <= n { i := i + 1; } }");
  const auto &d = declOf(r, "count");
  auto h = histogram(d);
  CHECK(h[DiagKind::Postcondition] == 1);
  CHECK(h[DiagKind::InvariantEntry] == 1);
  CHECK(h[DiagKind::InvariantMaintenance] == 1);
  CHECK(h[DiagKind::DecreasesDecrease] == 1);
  CHECK(d.obligations.size() == 4);

  // entry: the invariant after i := 0
  const auto &entry = only(d, DiagKind::InvariantEntry);
  CHECK(pretty_print(entry.goal) == "0 <= 0 && 0 <= n");

  // maintenance speaks about a renamed (arbitrary-iteration) state
  const auto &maint = only(d, DiagKind::InvariantMaintenance);
  bool sawInv = false, sawGuard = false;
  for (const auto &hyp : maint.hypotheses) {
    std::string s = pretty_print(hyp);
    sawInv |= s.find("<=") != std::string::npos && s.find("!") != std::string::npos;
    sawGuard |= s.find("<") != std::string::npos;
  }
  CHECK(sawInv);
  CHECK(sawGuard);
  CHECK(pretty_print(maint.goal).find("+ 1") != std::string::npos);

  // the guessed loop metric
  REQUIRE(d.metrics.size() == 1);
  CHECK(d.metrics[0].guessed);
  CHECK(pretty_print(d.metrics[0].metric[0]) == "n - i");

  // the postcondition may assume invariant and guard negation
  const auto &post = only(d, DiagKind::Postcondition);
  CHECK(post.hypotheses.size() >= 3); // requires, invariant, !guard
}

TEST_CASE("method call: precondition checked, postcondition assumed") {
  auto r = gen("method callee(x: int) returns (y: int)\n"
               "  requires x > 0 ensures y > x { y := x + 1; }\n"
               "method caller() returns (z: int) ensures z > 1\n"
               "{ z := callee(1); }");
  const auto &d = declOf(r, "caller");
  auto h = histogram(d);
  CHECK(h[DiagKind::PreconditionAtCall] == 1);
  CHECK(h[DiagKind::Postcondition] == 1);
  const auto &pre = only(d, DiagKind::PreconditionAtCall);
  CHECK(pretty_print(pre.goal) == "1 > 0");
  const auto &post = only(d, DiagKind::Postcondition);
  // the callee's ensures about the havoced result is available
  bool sawEnsures = false;
  for (const auto &hyp : post.hypotheses)
    sawEnsures |= pretty_print(hyp).find("> 1") != std::string::npos;
  CHECK(sawEnsures);
  // and the havoced name is fresh, not the source name
  CHECK(pretty_print(post.goal) != "z > 1");
}

TEST_CASE("heap assignment becomes a store; entry heap is the old heap") {
  auto r = gen("method set0(a: array<int>)\n"
               "  requires a != null requires a.Length > 0\n"
               "  modifies a ensures a[0] == 1\n"
               "{ a[0] := 1; }");
  const auto &d = declOf(r, "set0");
  auto h = histogram(d);
  CHECK(h[DiagKind::Postcondition] == 1);
  CHECK(h[DiagKind::NullDeref] == 3);   // requires, ensures, assignment
  CHECK(h[DiagKind::IndexBounds] == 2); // ensures, assignment
  const auto &post = only(d, DiagKind::Postcondition);
  std::string g = pretty_print(post.goal);
  CHECK(g.find("$store") != std::string::npos);
  CHECK(g.find("$heap!old") != std::string::npos);
}

TEST_CASE("old() reads the entry heap") {
  auto r = gen("method inc(a: array<int>)\n"
               "  requires a != null && a.Length > 0\n"
               "  modifies a ensures a[0] == old(a[0]) + 1\n"
               "{ a[0] := a[0] + 1; }");
  const auto &post = only(declOf(r, "inc"), DiagKind::Postcondition);
  std::string g = pretty_print(post.goal);
  CHECK(g.find("$heap!old") != std::string::npos);
  CHECK(g.find("$store") != std::string::npos);
}

TEST_CASE("calc: one step obligation per line pair, hints stay local") {
  auto r = gen("function exp(x: int, e: int): int requires e >= 0\n"
               "{ if e == 0 then 1 else x * exp(x, e - 1) }\n"
               "lemma L(x: int) requires x > 0 {\n"
               "  calc { x * 1; == x; == { assert x == x; } x + 0; }\n"
               "}");
  const auto &d = declOf(r, "L");
  auto h = histogram(d);
  CHECK(h[DiagKind::CalcStep] == 2);
  CHECK(h[DiagKind::Assertion] == 1); // the hint's assert
  for (const auto &ob : d.obligations)
    if (ob.kind == DiagKind::CalcStep) {
      // steps assume the lemma's requires and their own hints, but never
      // each other's conclusions
      CHECK(pretty_print(ob.hypotheses[0]) == "x > 0");
      for (const auto &hyp : ob.hypotheses)
        CHECK(pretty_print(hyp).find("+ 0") == std::string::npos);
    }
}

TEST_CASE("assume adds hypotheses downstream only") {
  auto r = gen("method m(x: int) { assert x >= 0 || x < 0; assume x > 10;\n"
               "  assert x > 5; }");
  const auto &d = declOf(r, "m");
  REQUIRE(d.obligations.size() == 2);
  // obligations are collected back to front: the later assert first
  const auto &late = d.obligations[0];
  CHECK(pretty_print(late.goal) == "x > 5");
  bool sawAssume = false;
  for (const auto &hyp : late.hypotheses)
    sawAssume |= pretty_print(hyp) == "x > 10";
  CHECK(sawAssume);
  const auto &early = d.obligations[1];
  CHECK(early.hypotheses.empty());
}

TEST_CASE("if branches guard their obligations") {
  auto r = gen("method m(x: int) returns (y: int) ensures y >= 0\n"
               "{ if x < 0 { y := -x; assert -x >= 0; } else { y := x; } }");
  const auto &d = declOf(r, "m");
  auto h = histogram(d);
  CHECK(h[DiagKind::Assertion] == 1);
  CHECK(h[DiagKind::Postcondition] == 1);
  const auto &a = only(d, DiagKind::Assertion);
  REQUIRE(a.hypotheses.size() == 1);
  CHECK(pretty_print(a.hypotheses[0]) == "x < 0");
  const auto &post = only(d, DiagKind::Postcondition);
  std::string g = pretty_print(post.goal);
  CHECK(g.find("x < 0") != std::string::npos);
  CHECK(g.find("!(x < 0)") != std::string::npos);
}

TEST_CASE("mutual recursion over datatypes uses rank ordering") {
  auto r = gen(
      "datatype List<T> = Nil | Cons(head: T, tail: List<T>)\n"
      "method M(xs: List<int>) decreases xs, 1 {\n"
      "  match xs { case Nil => {} case Cons(h, t) => { M1(xs); } }\n"
      "}\n"
      "method M1(xs: List<int>) decreases xs, 0 {\n"
      "  if xs != Nil { M(xs.tail); }\n"
      "}");
  const auto &m = declOf(r, "M");
  const auto &dec = only(m, DiagKind::DecreasesDecrease);
  std::string g = pretty_print(dec.goal);
  // equal first component, 1 -> 0 strictly
  CHECK(g.find("$rank") != std::string::npos);
  CHECK(g.find("0 < 1") != std::string::npos);
  // the call sits inside the Cons case
  bool sawTest = false;
  for (const auto &hyp : dec.hypotheses)
    sawTest |= pretty_print(hyp).find("$is$Cons") != std::string::npos;
  CHECK(sawTest);

  const auto &m1 = declOf(r, "M1");
  const auto &dec1 = only(m1, DiagKind::DecreasesDecrease);
  std::string g1 = pretty_print(dec1.goal);
  CHECK(g1.find("$rank(xs.tail) < $rank(xs)") != std::string::npos);
}

TEST_CASE("destructor use requires the right constructor") {
  auto r = gen("datatype List<T> = Nil | Cons(head: T, tail: List<T>)\n"
               "function len(xs: List<int>): int\n"
               "{ if xs == Nil then 0 else 1 + len(xs.tail) }");
  const auto &d = declOf(r, "len");
  bool sawIsCons = false;
  for (const auto &ob : d.obligations)
    sawIsCons |= pretty_print(ob.goal).find("$is$Cons(xs)") != std::string::npos;
  CHECK(sawIsCons);
}

TEST_CASE("short-circuit well-formedness in function bodies") {
  auto r = gen("function safeDiv(a: int, b: int): int\n"
               "{ if b == 0 then 0 else a / b }");
  const auto &d = declOf(r, "safeDiv");
  REQUIRE(d.obligations.size() == 1);
  const auto &ob = d.obligations[0];
  CHECK(ob.kind == DiagKind::Division);
  REQUIRE(ob.hypotheses.size() == 1);
  CHECK(pretty_print(ob.hypotheses[0]) == "!(b == 0)");
  CHECK(pretty_print(ob.goal) == "b != 0");
}

TEST_CASE("quantified well-formedness stays quantified") {
  auto r = gen("function ok(a: array<int>): bool requires a != null reads a\n"
               "{ forall i :: 0 <= i < a.Length ==> a[i] >= 0 }");
  const auto &d = declOf(r, "ok");
  bool sawForallBounds = false;
  for (const auto &ob : d.obligations)
    if (ob.kind == DiagKind::IndexBounds &&
        ob.goal->kind == ExprKind::Forall)
      sawForallBounds = true;
  CHECK(sawForallBounds);
}

TEST_CASE("missing loop metric is reported") {
  auto r = gen("method m(p: bool) { while p invariant true { } }");
  bool saw = false;
  for (const auto &diag : r.diagnostics)
    saw |= diag.kind == DiagKind::TerminationMetricMissing;
  CHECK(saw);
  CHECK(!r.ok());
}

TEST_CASE("bodiless lemma: contract assumed, flagged") {
  auto r = gen("lemma Axiom(x: int) requires x > 0 ensures x * x > 0");
  const auto &d = declOf(r, "Axiom");
  CHECK(d.bodiless);
  CHECK(histogram(d)[DiagKind::Postcondition] == 0);
  bool saw = false;
  for (const auto &diag : r.diagnostics)
    saw |= diag.kind == DiagKind::AssumedLemma &&
           diag.severity == Severity::Warning;
  CHECK(saw);
}

TEST_CASE("substitution respects binders") {
  ExprPtr e = parse_expression("forall x :: x < y");
  ExprPtr r = subst_vars(e, {{"x", mk_int(5)}});
  CHECK(pretty_print(r) == "forall x :: x < y");
  ExprPtr r2 = subst_vars(e, {{"y", mk_int(5)}});
  CHECK(pretty_print(r2) == "forall x :: x < 5");
}

TEST_CASE("simultaneous swap stores against the pre-state heap") {
  auto r = gen("method swap(a: array<int>, j: int)\n"
               "  requires a != null && 1 <= j < a.Length\n"
               "  modifies a ensures a[j] == old(a[j - 1])\n"
               "{ a[j - 1], a[j] := a[j], a[j - 1]; }");
  const auto &post = only(declOf(r, "swap"), DiagKind::Postcondition);
  std::string g = pretty_print(post.goal);
  // two nested stores, and the swapped values read the entry heap
  size_t first = g.find("$store");
  REQUIRE(first != std::string::npos);
  CHECK(g.find("$store", first + 1) != std::string::npos);
}
