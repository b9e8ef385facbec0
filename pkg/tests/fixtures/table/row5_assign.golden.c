void row_assign(long* q) {
  long q_adj = 0;
  long* p;
  long p_adj = 0;
  p = q;
  p_adj = q_adj;
  p[p_adj] = 4;
}
