void row_callee(long* p) {
  long k = *p;
  p[k] = k + 1;
}
