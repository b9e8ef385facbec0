long double_ptr_fixture(long i) {
  long* a = alloc(long, 10);
  long a_adj = 0;
  for (long j = 0; j < 10; j++) {
    a[j + a_adj] = j * 11 + 5;
  }
  long** p = &a;
  long p_adj = 0;
  long x = p[p_adj][i + a_adj];
  a_adj++;
  long y = p[p_adj][i + a_adj];
  return x + y;
}
