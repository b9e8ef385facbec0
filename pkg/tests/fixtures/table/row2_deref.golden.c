long row_deref(long* p) {
  long p_adj = 0;
  p[p_adj] = 3;
  return p[p_adj];
}
