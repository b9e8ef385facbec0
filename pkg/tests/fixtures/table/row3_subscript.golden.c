long row_subscript(long* p, long x) {
  long p_adj = 0;
  p[x + p_adj] = 7;
  return p[x + 1 + p_adj];
}
