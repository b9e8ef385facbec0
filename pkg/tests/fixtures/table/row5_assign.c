void row_assign(long* q) {
  long* p;
  p = q;
  p[0] = 4;
}
