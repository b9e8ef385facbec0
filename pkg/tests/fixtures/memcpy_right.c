/* the copy only fills a round-local byte; the source is never written */
void memcpy(char* dst, char* src, long n);

long* memcpy_right_fixture(long n) {
  char* q = alloc(char, 1);
  q[0] = 42;
  long* data = alloc(long, 128);
  for (long i = 0; i < n; i++) {
    char p = 0;
    memcpy(&p, q, 1);
    data[i] = p + i;
  }
  return data;
}
