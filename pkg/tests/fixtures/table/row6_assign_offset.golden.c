void row_assign_offset(long* q, long x) {
  long q_adj = 0;
  long* p;
  long p_adj = 0;
  p = q;
  p_adj = q_adj + x;
  p[p_adj] = 5;
}
