#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "minivc/interp.hpp"
#include "minivc/parser.hpp"
#include "minivc/pretty.hpp"

using namespace minivc;

static ResolvedProgram load(const std::string &src) {
  auto r = parse(src, "t.dfy");
  for (auto &d : r.diagnostics)
    INFO(format_diagnostic(d));
  REQUIRE(r.ok());
  auto p = resolve(std::move(r.program));
  for (auto &d : p.diagnostics)
    INFO(format_diagnostic(d));
  REQUIRE(p.ok());
  return p;
}

static const char *kFactorialSrc = R"(
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
)";

TEST_CASE("computeFactorial oracle values") {
  auto p = load(kFactorialSrc);
  Interp in(p);
  auto r = in.runMethod("computeFactorial", {Value::mkInt(5)});
  REQUIRE(r.ok());
  CHECK(r.outs[0] == Value::mkInt(120));

  // oracle agreement with the function definition, n in 1..10
  int64_t expect = 1;
  for (int n = 1; n <= 10; ++n) {
    expect *= n;
    auto rn = in.runMethod("computeFactorial", {Value::mkInt(n)});
    REQUIRE(rn.ok());
    CHECK(rn.outs[0] == Value::mkInt(expect));
    auto fn = in.evalCall("factorial", {Value::mkInt(n)});
    REQUIRE(fn.has_value());
    CHECK(*fn == Value::mkInt(expect));
  }
}

TEST_CASE("factorial precondition guards evaluation") {
  auto p = load(kFactorialSrc);
  Interp in(p);
  CHECK(!in.evalCall("factorial", {Value::mkInt(-1)}).has_value());
  auto v = in.evalCall("factorial", {Value::mkInt(0)});
  REQUIRE(v.has_value());
  CHECK(*v == Value::mkInt(1));
}

static const char *kExpSrc = R"(
function exp(b: int, e: int): int
  requires e >= 0
{
  if e == 0 then 1 else b * exp(b, e - 1)
}
function f(k: int): int
  requires k >= 0
{
  (exp(2, 3 * k) - exp(3, k)) / 5
}
method compute5f(k: int) returns (r: int)
  requires k >= 1
  ensures r == 5 * f(k)
{
  var i := 0;
  var t1 := 1;
  var t2 := 1;
  r := 0;
  while i < k
    invariant 0 <= i <= k
    invariant t1 == exp(2, 3 * i) && t2 == exp(3, i)
    invariant r == 5 * (if i == 0 then 0 else f(i))
  {
    i := i + 1;
    t1 := 8 * t1;
    t2 := 3 * t2;
    r := t1 - t2;
  }
}
)";

TEST_CASE("exp and f oracle values") {
  auto p = load(kExpSrc);
  Interp in(p);
  auto e = in.evalCall("exp", {Value::mkInt(3), Value::mkInt(2)});
  REQUIRE(e.has_value());
  CHECK(*e == Value::mkInt(9));
  // f(2) = (exp(2,6) - exp(3,2)) / 5 = (64 - 9) / 5 = 11
  auto fv = in.evalCall("f", {Value::mkInt(2)});
  REQUIRE(fv.has_value());
  CHECK(*fv == Value::mkInt(11));
}

TEST_CASE("compute5f agrees with 5*f(k) for k in 1..8") {
  auto p = load(kExpSrc);
  Interp in(p);
  for (int k = 1; k <= 8; ++k) {
    auto r = in.runMethod("compute5f", {Value::mkInt(k)});
    REQUIRE(r.ok());
    auto fv = in.evalCall("f", {Value::mkInt(k)});
    REQUIRE(fv.has_value());
    CHECK(r.outs[0] == Value::mkInt(5 * fv->i));
  }
}

static const char *kBubbleSrc = R"(
predicate sorted(a: array<int>)
  reads a
{
  forall i, j :: 0 <= i < j < a.Length ==> a[i] <= a[j]
}
method bubbleSort(a: array<int>)
  requires a != null && a.Length > 0
  modifies a
  ensures sorted(a) && multiset(a[..]) == old(multiset(a[..]))
{
  var i := a.Length - 1;
  while i > 0
    invariant 0 <= i < a.Length
    invariant forall p, q :: i <= p < q < a.Length ==> a[p] <= a[q]
    invariant forall p, q :: 0 <= p <= i < q < a.Length ==> a[p] <= a[q]
    invariant multiset(a[..]) == old(multiset(a[..]))
  {
    var j := 0;
    while j < i
      invariant 0 <= j <= i
      invariant forall p, q :: i <= p < q < a.Length ==> a[p] <= a[q]
      invariant forall p, q :: 0 <= p <= i < q < a.Length ==> a[p] <= a[q]
      invariant forall p :: 0 <= p < j ==> a[p] <= a[j]
      invariant multiset(a[..]) == old(multiset(a[..]))
    {
      if a[j] > a[j + 1] {
        a[j], a[j + 1] := a[j + 1], a[j];
      }
      j := j + 1;
    }
    i := i - 1;
  }
}
)";

TEST_CASE("bubbleSort sorts the worked example") {
  auto p = load(kBubbleSrc);
  Interp in(p, /*checkContracts=*/true);
  auto arr = Value::mkArray({Value::mkInt(7), Value::mkInt(2), Value::mkInt(6),
                             Value::mkInt(3), Value::mkInt(4)});
  auto r = in.runMethod("bubbleSort", {arr});
  if (r.fault)
    INFO(r.fault->message);
  REQUIRE(r.ok());
  std::vector<int64_t> got;
  for (auto &v : *arr.arr)
    got.push_back(v.i);
  CHECK(got == std::vector<int64_t>{2, 3, 4, 6, 7});
}

TEST_CASE("bubbleSort property: sorted and multiset-preserving") {
  auto p = load(kBubbleSrc);

  auto runOne = [&](std::vector<int64_t> input) {
    Interp in(p, /*checkContracts=*/true);
    std::vector<Value> elems;
    for (auto x : input)
      elems.push_back(Value::mkInt(x));
    auto arr = Value::mkArray(elems);
    auto r = in.runMethod("bubbleSort", {arr});
    if (r.fault)
      INFO("fault: " << r.fault->message << " on input size " << input.size());
    REQUIRE(r.ok());
    std::vector<int64_t> got;
    for (auto &v : *arr.arr)
      got.push_back(v.i);
    std::sort(input.begin(), input.end());
    REQUIRE(got == input);
  };

  // exhaustive: length <= 6 over {-1, 0, 1, 2}... capped to length <= 4 for
  // the contract-checked sweep (quantified invariants are O(n^2) per step),
  // plus randomized larger arrays below
  const std::vector<int64_t> dom{-1, 0, 1, 2};
  for (size_t len = 1; len <= 4; ++len) {
    std::vector<size_t> idx(len, 0);
    while (true) {
      std::vector<int64_t> input;
      for (auto ix : idx)
        input.push_back(dom[ix]);
      runOne(input);
      size_t i = 0;
      for (; i < len; ++i) {
        if (++idx[i] < dom.size())
          break;
        idx[i] = 0;
      }
      if (i == len)
        break;
    }
  }

  std::mt19937 rng(12345);
  for (int t = 0; t < 50; ++t) {
    std::uniform_int_distribution<int> lenD(1, 12), valD(-100, 100);
    std::vector<int64_t> input(lenD(rng));
    for (auto &x : input)
      x = valD(rng);
    runOne(input);
  }
}

TEST_CASE("multiset equality is order-insensitive") {
  auto a = Value::mkMultiset({Value::mkInt(2), Value::mkInt(7)});
  auto b = Value::mkMultiset({Value::mkInt(7), Value::mkInt(2)});
  CHECK(a == b);
  auto c = Value::mkMultiset({Value::mkInt(7), Value::mkInt(7)});
  CHECK(a != c);
}

TEST_CASE("contract checking catches violations") {
  auto p = load(kFactorialSrc);
  Interp in(p, /*checkContracts=*/true);
  auto r = in.runMethod("computeFactorial", {Value::mkInt(0)});
  REQUIRE(!r.ok());
  CHECK(r.fault->kind == RuntimeFault::Kind::Precondition);

  auto p2 = load(R"(
method bad(n: int) returns (x: int)
  requires n >= 0
  ensures x == n + 1
{
  x := n;
}
)");
  Interp in2(p2, true);
  auto r2 = in2.runMethod("bad", {Value::mkInt(3)});
  REQUIRE(!r2.ok());
  CHECK(r2.fault->kind == RuntimeFault::Kind::Postcondition);

  auto p3 = load(R"(
method badInv(n: int) returns (x: int)
  requires n >= 1
{
  x := 0;
  while x < n
    invariant x == 0
  {
    x := x + 1;
  }
}
)");
  Interp in3(p3, true);
  auto r3 = in3.runMethod("badInv", {Value::mkInt(2)});
  REQUIRE(!r3.ok());
  CHECK(r3.fault->kind == RuntimeFault::Kind::Invariant);
}

TEST_CASE("runtime faults: bounds, null, division, budget") {
  auto p = load(R"(
method getAt(a: array<int>, i: int) returns (x: int)
{
  x := a[i];
}
method divBy(n: int, d: int) returns (x: int)
{
  x := n / d;
}
method spin() returns (x: int)
{
  x := 0;
  while true
  {
    x := x + 1;
  }
}
)");
  Interp in(p);
  auto arr = Value::mkArray({Value::mkInt(1)});
  auto r1 = in.runMethod("getAt", {arr, Value::mkInt(5)});
  REQUIRE(!r1.ok());
  CHECK(r1.fault->kind == RuntimeFault::Kind::Bounds);

  auto r2 = in.runMethod("getAt", {Value::mkNull(), Value::mkInt(0)});
  REQUIRE(!r2.ok());
  CHECK(r2.fault->kind == RuntimeFault::Kind::Null);

  auto r3 = in.runMethod("divBy", {Value::mkInt(1), Value::mkInt(0)});
  REQUIRE(!r3.ok());
  CHECK(r3.fault->kind == RuntimeFault::Kind::Division);

  auto r4 = in.runMethod("spin", {});
  REQUIRE(!r4.ok());
  CHECK(r4.fault->kind == RuntimeFault::Kind::Budget);
}

TEST_CASE("euclidean division semantics") {
  auto p = load(R"(
method dm(a: int, b: int) returns (q: int, r: int)
  requires b != 0
{
  q := a / b;
  r := a % b;
}
)");
  Interp in(p);
  auto r = in.runMethod("dm", {Value::mkInt(-7), Value::mkInt(5)});
  REQUIRE(r.ok());
  // Euclidean: remainder non-negative, a == q*b + r
  CHECK(r.outs[0] == Value::mkInt(-2));
  CHECK(r.outs[1] == Value::mkInt(3));
}

TEST_CASE("ghost state is erased in plain runs but kept when checking") {
  const char *src = R"(
method M(n: int) returns (x: int)
  requires n >= 0
{
  ghost var c := 0;
  x := 0;
  while x < n
    invariant 0 <= x <= n && c == 2 * x
  {
    x := x + 1;
    c := c + 2;
  }
}
)";
  auto p = load(src);
  Interp plain(p, false);
  auto r = plain.runMethod("M", {Value::mkInt(4)});
  REQUIRE(r.ok());
  CHECK(r.outs[0] == Value::mkInt(4));

  Interp check(p, true);
  auto r2 = check.runMethod("M", {Value::mkInt(4)});
  if (r2.fault)
    INFO(r2.fault->message);
  REQUIRE(r2.ok());
}

TEST_CASE("datatypes and match execute") {
  auto p = load(R"(
datatype List = Nil | Cons(head: int, tail: List)
function len(xs: List): int
{
  if xs == Nil then 0 else 1 + len(xs.tail)
}
method sum(xs: List) returns (s: int)
{
  s := 0;
  var cur := xs;
  while cur != Nil
  {
    match cur {
      case Nil => { }
      case Cons(h, t) => { s := s + h; cur := t; }
    }
  }
}
)");
  Interp in(p);
  Value xs = Value::mkDatatype(
      "Cons", {Value::mkInt(1),
               Value::mkDatatype(
                   "Cons", {Value::mkInt(2), Value::mkDatatype("Nil", {})})});
  auto lv = in.evalCall("len", {xs});
  REQUIRE(lv.has_value());
  CHECK(*lv == Value::mkInt(2));
  auto r = in.runMethod("sum", {xs});
  REQUIRE(r.ok());
  CHECK(r.outs[0] == Value::mkInt(3));
}

TEST_CASE("old() sees entry-state array contents") {
  auto p = load(R"(
method negate(a: array<int>)
  requires a != null && a.Length > 0
  modifies a
  ensures forall i :: 0 <= i < a.Length ==> a[i] == -old(a[i])
{
  var i := 0;
  while i < a.Length
    invariant 0 <= i <= a.Length
    invariant forall j :: 0 <= j < i ==> a[j] == -old(a[j])
    invariant forall j :: i <= j < a.Length ==> a[j] == old(a[j])
  {
    a[i] := -a[i];
    i := i + 1;
  }
}
)");
  Interp in(p, true);
  auto arr = Value::mkArray({Value::mkInt(3), Value::mkInt(-4), Value::mkInt(0)});
  auto r = in.runMethod("negate", {arr});
  if (r.fault)
    INFO(r.fault->message);
  REQUIRE(r.ok());
  CHECK((*arr.arr)[0] == Value::mkInt(-3));
  CHECK((*arr.arr)[1] == Value::mkInt(4));
}

TEST_CASE("value literal parsing for the CLI") {
  auto v = parse_value("[1, 2, 3]");
  REQUIRE(v.has_value());
  CHECK(v->k == Value::K::Array);
  CHECK((*v->arr)[2] == Value::mkInt(3));
  CHECK(parse_value("-42")->i == -42);
  CHECK(parse_value("true")->k == Value::K::Bool);
  CHECK(!parse_value("nope").has_value());
}
