/* each round reads what the previous round's copy wrote: a real chain */
void memcpy(char* dst, char* src, long n);

char* memcpy_left_fixture(long n) {
  char* p = alloc(char, 1);
  p[0] = 0;
  for (long i = 0; i < n; i++) {
    char q = *p + i;
    memcpy(p, &q, 1);
  }
  return p;
}
