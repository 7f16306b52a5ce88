method compute5f(k: int) returns (r: int)
  requires k >= 1
  ensures r == 5 * f(k)
{
  var i, t1, t2 := 0, 1, 1;
  while i < k
    invariant 0 <= i <= k;
    invariant t1 == exp(2,3*i);
    invariant t2 == exp(3,i);
  {
    i, t1, t2 := i+1, 8*t1, 3*t2;
  }
  r := t1-t2;
}

function f(k: int): int
  requires k >= 1;
{
  (exp(2,3*k) - exp(3,k)) / 5
}

function exp(x: int, e: int): int
  requires e >= 0
{
  if e == 0 then 1 else x * exp(x,e-1)
}
