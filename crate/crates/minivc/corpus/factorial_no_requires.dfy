function factorial(n: int): int
//  requires n >= 0;
{
  if n == 0 then 1 else n * factorial(n-1)
}
