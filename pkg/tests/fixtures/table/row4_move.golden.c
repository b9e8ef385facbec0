void row_move(long* p, long x) {
  long p_adj = 0;
  p_adj += x;
  p_adj -= 1;
  p_adj++;
  p_adj--;
  p_adj = p_adj + x;
  p_adj = p_adj - 2;
  p[p_adj] = 9;
}
