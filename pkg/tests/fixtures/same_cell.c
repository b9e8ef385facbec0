/* every round folds into one cell: ordering is the computation */
long* same_cell_fixture(long n) {
  long* s = alloc(long, 4);
  long* a = alloc(long, 128);
  s[0] = 0;
  for (long j = 0; j < 128; j++) {
    a[j] = j * 5 + 1;
  }
  for (long i = 0; i < n; i++) {
    s[0] = s[0] + a[i];
  }
  return s;
}
