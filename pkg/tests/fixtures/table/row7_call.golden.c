void callee(long* r);

void row_call(long* p) {
  long p_adj = 0;
  p_adj += 1;
  callee(p + p_adj);
}
