/* unconditional rebinding keeps each access at a single known container */
long decidable_fixture(long i) {
  long* a = alloc(long, 8);
  long* b = alloc(long, 8);
  for (long j = 0; j < 8; j++) {
    a[j] = j;
    b[j] = j * 10;
  }
  long* p;
  p = a;
  p[i] = 5;
  p = b;
  p[i] = 2;
  return a[i] + b[i];
}
