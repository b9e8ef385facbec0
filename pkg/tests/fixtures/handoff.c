/* the callee allocates and rebinds through the pointer's address */
int atoi(char* s);
void memset(char* dst, long value, long n);

void init_pointer(char** p, int n) {
  *p = alloc(char, n);
  memset(*p, 0, n);
}

long handoff_fixture(long n) {
  char* buf;
  init_pointer(&buf, 16);
  for (long i = 0; i < n; i++) {
    buf[i] = i * 3;
  }
  buf += 2;
  return buf[0];
}
