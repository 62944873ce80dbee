predicate sortedBetween(a: array<int>, lo: int, hi: int)
  requires a != null && 0 <= lo <= hi <= a.Length
  reads a
{
  forall i, j :: lo <= i < j < hi ==> a[i] <= a[j]
}

method bubbleStep(a: array<int>, i: int)
  requires a != null && 0 <= i < a.Length && sortedBetween(a, 0, i)
  modifies a
  ensures sortedBetween(a, 0, i + 1)
{
  var j := i;
  while j > 0 && a[j - 1] > a[j]
    invariant 0 <= j <= i && sortedBetween(a, 0, j) && sortedBetween(a, j, i + 1)
    invariant j + 1 <= i ==> a[j - 1] <= a[j + 1]
  {
    a[j - 1], a[j] := a[j], a[j - 1];
    j := j - 1;
  }
}
