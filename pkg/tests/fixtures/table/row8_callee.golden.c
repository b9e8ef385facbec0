void row_callee(long* p) {
  long p_adj = 0;
  long k = p[p_adj];
  p[k + p_adj] = k + 1;
}
