void row_decl(long n) {
  long* p;
  long p_adj = 0;
  long* q = alloc(long, 4);
  long q_adj = 0;
  q[q_adj] = n;
  p = q;
  p_adj = q_adj;
  p[p_adj] = 1;
}
