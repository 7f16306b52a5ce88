function exp(x: int, e: int): int
  requires e >= 0
{
  if e == 0 then 1 else x * exp(x,e-1)
}

lemma DivBy5_NoHint(k: int)
  requires k >= 1
  ensures (exp(2,3*k) - exp(3,k)) % 5 == 0
{
}
