void row_decl(long n) {
  long* p;
  long* q = alloc(long, 4);
  q[0] = n;
  p = q;
  p[0] = 1;
}
