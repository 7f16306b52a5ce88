predicate sorted (a:array<int>)
  requires a != null
  reads a
{
sortedBetween(a,0,a.Length)
}

predicate sortedBetween (a:array<int>, lo:int, hi:int)
  requires a != null && 0 <= lo <= hi <= a.Length
  reads a
{
forall i,j :: lo <= i < j < hi ==> a[i] <= a[j]
}

method bubbleSort (a: array<int>)
  requires a != null
  modifies a
  ensures sorted(a)
{
if a.Length > 1
	{
	var i := 1;
	while i < a.Length
		invariant 1 <= i <= a.Length;
		invariant sortedBetween(a,0,i);
		{
		// bubbleStep(a,i);
		assume sortedBetween(a,0,i+1);
		i:= i+1;
		}
	}
}
