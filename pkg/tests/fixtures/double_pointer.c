/* a handle pointing at a pointer variable: the inner level keeps moving */
long double_ptr_fixture(long i) {
  long* a = alloc(long, 10);
  for (long j = 0; j < 10; j++) {
    a[j] = j * 11 + 5;
  }
  long** p = &a;
  long x = (*p)[i];
  a++;
  long y = (*p)[i];
  return x + y;
}
