long row_subscript(long* p, long x) {
  p[x] = 7;
  return p[x + 1];
}
