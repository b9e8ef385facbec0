/* branch-dependent movement: offsets only settle at run time */
long conditional_fixture(int exp) {
  long* a = alloc(long, 10);
  for (long j = 0; j < 10; j++) {
    a[j] = j * 2 + 3;
  }
  long* ptr = a;
  long* x;
  long* y;
  if (exp) {
    x = ptr++;
  } else {
    y = ptr + 2;
  }
  long r = 0;
  if (exp) {
    r = x[0] + ptr[1];
  } else {
    r = y[0] + ptr[0];
  }
  return r;
}
