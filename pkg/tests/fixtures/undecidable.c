/* the container behind p depends on an unknown branch */
long undecidable_fixture(int c, long i) {
  long* a = alloc(long, 8);
  long* b = alloc(long, 8);
  for (long j = 0; j < 8; j++) {
    a[j] = j;
    b[j] = j * 10;
  }
  long* p;
  if (c) {
    p = a;
  } else {
    p = b;
  }
  p[i] = 5;
  return p[i];
}
