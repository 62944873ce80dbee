function factorial(n: int): int
  requires n >= 0
{
  if n == 0 then 1 else n * factorial(n - 1)
}

method computeFactorial(n: int) returns (f: int)
  requires n >= 0
  ensures f == factorial(n)
{
  var i := 0;
  f := n;
  while i < n - 1
    invariant 0 <= i <= n - 1
    invariant f * factorial(n - i - 1) == factorial(n)
  {
    i := i + 1;
    f := f * (n - i);
  }
}
