#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "minivc/parser.hpp"
#include "minivc/pretty.hpp"
#include "minivc/resolver.hpp"

using namespace minivc;

static ResolvedProgram rp(const std::string &src) {
  auto r = parse(src, "t.dfy");
  for (auto &d : r.diagnostics)
    INFO(format_diagnostic(d));
  REQUIRE(r.ok());
  return resolve(std::move(r.program));
}

static bool hasKind(const ResolvedProgram &p, DiagKind k) {
  for (auto &d : p.diagnostics)
    if (d.kind == k)
      return true;
  return false;
}

static std::string allDiags(const ResolvedProgram &p) {
  std::string s;
  for (auto &d : p.diagnostics)
    s += format_diagnostic(d) + "\n";
  return s;
}

TEST_CASE("well-typed program resolves cleanly") {
  auto p = rp(R"(
function factorial(n: int): int
  requires n >= 0
{
  if n == 0 then 1 else n * factorial(n - 1)
}
method computeFactorial(n: int) returns (f: int)
  requires n >= 1
  ensures f == factorial(n)
{
  var i := 1;
  f := 1;
  while i < n
    invariant 1 <= i <= n
    invariant f == factorial(i)
  {
    i := i + 1;
    f := f * i;
  }
}
)");
  INFO(allDiags(p));
  CHECK(p.ok());
  CHECK(p.recursive.count("factorial") == 1);
  CHECK(p.recursive.count("computeFactorial") == 0);
  CHECK(p.callGraph.at("computeFactorial").count("factorial") == 1);
}

TEST_CASE("type mismatch at call site") {
  auto p = rp(R"(
function factorial(n: int): int
  requires n >= 0
{
  if n == 0 then 1 else n * factorial(n - 1)
}
method M() returns (x: int)
{
  x := 0;
  var b := true;
  var y := factorial(b);
}
)");
  CHECK(!p.ok());
  CHECK(hasKind(p, DiagKind::TypeError));
}

TEST_CASE("unresolved names and arity errors have spans") {
  auto p = rp("method M() returns (x: int) { x := nope(1); }");
  CHECK(!p.ok());
  REQUIRE(!p.diagnostics.empty());
  CHECK(p.diagnostics[0].kind == DiagKind::Resolve);
  CHECK(p.diagnostics[0].span.line == 1);
}

TEST_CASE("ghost flow violations") {
  // ghost variable read in compiled assignment
  auto p = rp(R"(
method M(n: int) returns (x: int)
{
  ghost var g := n + 1;
  x := g;
}
)");
  CHECK(hasKind(p, DiagKind::GhostFlow));

  // ghost guard controls compiled loop
  auto p2 = rp(R"(
method M(n: int) returns (x: int)
{
  ghost var g := n;
  x := 0;
  while x < g
  {
    x := x + 1;
  }
}
)");
  CHECK(hasKind(p2, DiagKind::GhostFlow));

  // ghost updates inside compiled loops are fine
  auto p3 = rp(R"(
method M(n: int) returns (x: int)
  requires n >= 0
{
  ghost var g := 0;
  x := 0;
  while x < n
    invariant g == 2 * x
  {
    x := x + 1;
    g := g + 2;
  }
}
)");
  INFO(allDiags(p3));
  CHECK(p3.ok());
}

TEST_CASE("plain functions are ghost; function methods are compiled") {
  auto p = rp(R"(
function f(n: int): int { n + 1 }
method M(n: int) returns (x: int)
{
  x := f(n);
}
)");
  CHECK(hasKind(p, DiagKind::GhostFlow));

  auto p2 = rp(R"(
function method f(n: int): int { n + 1 }
method M(n: int) returns (x: int)
{
  x := f(n);
}
)");
  INFO(allDiags(p2));
  CHECK(p2.ok());
}

TEST_CASE("reads discipline for functions") {
  auto p = rp(R"(
predicate sorted(a: array<int>)
  reads a
{
  forall i, j :: 0 <= i < j < a.Length ==> a[i] <= a[j]
}
)");
  INFO(allDiags(p));
  CHECK(p.ok());

  auto p2 = rp(R"(
predicate sorted(a: array<int>)
{
  forall i, j :: 0 <= i < j < a.Length ==> a[i] <= a[j]
}
)");
  CHECK(hasKind(p2, DiagKind::ReadsViolation));

  // transitive: caller must cover callee's reads
  auto p3 = rp(R"(
predicate sortedBetween(a: array<int>, from: int, to: int)
  reads a
{
  forall i, j :: 0 <= from <= i < j <= to < a.Length ==> a[i] <= a[j]
}
predicate sorted(a: array<int>)
{
  sortedBetween(a, 0, a.Length - 1)
}
)");
  CHECK(hasKind(p3, DiagKind::ReadsViolation));
}

TEST_CASE("modifies discipline for methods") {
  auto p = rp(R"(
method zero(a: array<int>)
  requires a != null && a.Length > 0
{
  a[0] := 0;
}
)");
  CHECK(hasKind(p, DiagKind::ModifiesViolation));

  auto p2 = rp(R"(
method zero(a: array<int>)
  requires a != null && a.Length > 0
  modifies a
{
  a[0] := 0;
}
)");
  INFO(allDiags(p2));
  CHECK(p2.ok());

  // freshly allocated arrays are exempt
  auto p3 = rp(R"(
method mk(n: int) returns (a: array<int>)
  requires n >= 1
{
  a := new int[n];
  a[0] := 7;
}
)");
  INFO(allDiags(p3));
  CHECK(p3.ok());

  // calls propagate modifies requirements
  auto p4 = rp(R"(
method zero(a: array<int>)
  requires a != null && a.Length > 0
  modifies a
{
  a[0] := 0;
}
method caller(b: array<int>)
  requires b != null && b.Length > 0
{
  zero(b);
}
)");
  CHECK(hasKind(p4, DiagKind::ModifiesViolation));
}

TEST_CASE("definite assignment of out-parameters") {
  auto p = rp(R"(
method M(n: int) returns (x: int)
{
  if n > 0 {
    x := 1;
  }
}
)");
  CHECK(hasKind(p, DiagKind::DefiniteAssignment));

  auto p2 = rp(R"(
method M(n: int) returns (x: int)
{
  if n > 0 {
    x := 1;
  } else {
    x := 2;
  }
}
)");
  INFO(allDiags(p2));
  CHECK(p2.ok());
}

TEST_CASE("in-parameters are immutable") {
  auto p = rp("method M(n: int) returns (x: int) { n := 1; x := 0; }");
  CHECK(!p.ok());
  CHECK(hasKind(p, DiagKind::Resolve));
}

TEST_CASE("datatypes, constructors, match") {
  auto p = rp(R"(
datatype List = Nil | Cons(head: int, tail: List)
method M(xs: List) returns (n: int)
{
  n := 0;
  match xs {
    case Nil => { n := 0; }
    case Cons(h, t) => { n := h; }
  }
}
)");
  INFO(allDiags(p));
  CHECK(p.ok());

  // non-exhaustive match
  auto p2 = rp(R"(
datatype List = Nil | Cons(head: int, tail: List)
method M(xs: List) returns (n: int)
{
  n := 0;
  match xs {
    case Cons(h, t) => { n := h; }
  }
}
)");
  CHECK(!p2.ok());

  // nullary ctor used as value; dtor access
  auto p3 = rp(R"(
datatype List = Nil | Cons(head: int, tail: List)
function len(xs: List): int
{
  if xs == Nil then 0 else 1 + len(xs.tail)
}
)");
  INFO(allDiags(p3));
  CHECK(p3.ok());
  CHECK(p3.recursive.count("len") == 1);
}

TEST_CASE("mutual recursion forms one SCC") {
  auto p = rp(R"(
datatype List = Nil | Cons(head: int, tail: List)
method A(xs: List)
  decreases xs, 1
{
  if xs != Nil {
    B(xs.tail);
  }
}
method B(xs: List)
  decreases xs, 0
{
  A(xs);
}
)");
  INFO(allDiags(p));
  CHECK(p.ok());
  CHECK(p.sameScc("A", "B"));
  CHECK(p.recursive.count("A") == 1);
  CHECK(p.recursive.count("B") == 1);
  CHECK(!p.sameScc("A", "List"));
}

TEST_CASE("single-target method call becomes a Call statement") {
  auto p = rp(R"(
method helper(n: int) returns (r: int)
{
  r := n + 1;
}
method M(n: int) returns (x: int)
{
  x := helper(n);
}
)");
  INFO(allDiags(p));
  CHECK(p.ok());
  const auto *m = std::get_if<MethodDecl>(&p.program.decls[1]);
  REQUIRE(m != nullptr);
  CHECK((*m->body)[0]->kind == StmtKind::Call);
  CHECK((*m->body)[0]->callee == "helper");
}

TEST_CASE("generic method type-checks") {
  auto p = rp(R"(
method CreateArray<T>(n: int, d: T) returns (a: array<T>)
  requires n >= 0
  ensures a != null && a.Length == n
{
  a := new T[n];
  var i := 0;
  while i < n
    invariant 0 <= i <= n
  {
    a[i] := d;
    i := i + 1;
  }
}
)");
  INFO(allDiags(p));
  CHECK(p.ok());
}

TEST_CASE("old only in two-state contexts") {
  auto p = rp(R"(
function f(n: int): int { old(n) }
)");
  CHECK(!p.ok());

  auto p2 = rp(R"(
method swapFirst(a: array<int>)
  requires a != null && a.Length >= 2
  modifies a
  ensures multiset(a[..]) == old(multiset(a[..]))
{
  a[0], a[1] := a[1], a[0];
}
)");
  INFO(allDiags(p2));
  CHECK(p2.ok());
}

TEST_CASE("expression types are annotated") {
  auto p = rp(R"(
method M(a: array<int>) returns (x: int)
  requires a != null && a.Length > 0
{
  x := a[0];
}
)");
  REQUIRE(p.ok());
  const auto *m = std::get_if<MethodDecl>(&p.program.decls[0]);
  const auto &asg = (*m->body)[0];
  REQUIRE(asg->exprs[0]->type != nullptr);
  CHECK(asg->exprs[0]->type->kind == TypeKind::Int);
  CHECK(asg->exprs[0]->args[0]->type->kind == TypeKind::Array);
}
