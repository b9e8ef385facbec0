void row_assign_offset(long* q, long x) {
  long* p;
  p = q + x;
  p[0] = 5;
}
