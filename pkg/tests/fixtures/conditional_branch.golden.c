long conditional_fixture(int exp) {
  long* a = alloc(long, 10);
  long a_adj = 0;
  for (long j = 0; j < 10; j++) {
    a[j + a_adj] = j * 2 + 3;
  }
  long* ptr = a;
  long ptr_adj = a_adj;
  long* x;
  long* y;
  if (exp) {
    x = ptr + ptr_adj;
    ptr_adj++;
  } else {
    y = ptr + ptr_adj + 2;
  }
  long r = 0;
  if (exp) {
    r = x[0] + ptr[1 + ptr_adj];
  } else {
    r = y[0] + ptr[ptr_adj];
  }
  return r;
}
