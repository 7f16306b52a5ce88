datatype List<T> = Nil | Cons(head: T, tail: List<T>)

method M(xs: List<int>)
  decreases xs, 1
{
  match xs
  case Nil =>
  case Cons(y, ys) =>
    if y > 0 { M1(xs); } else { M2(xs); }
}

method M1(xs: List<int>)
  decreases xs, 0
{
  if xs != Nil { M(xs.tail); }
}

method M2(xs: List<int>)
  decreases xs, 0
{
  if xs != Nil && xs.head > 0 { M1(xs.tail); } else if xs != Nil { M(xs.tail); }
}
