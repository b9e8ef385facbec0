/* allocation handed off through the pointer's address */
int atoi(char* s);
void memset(char* dst, long value, long n);

void init_pointer(char** p, int n) {
  *p = alloc(char, n);
  memset(*p, 0, n);
}

int main(int argc, char** argv) {
  char* buf;
  init_pointer(&buf, atoi(argv[0]));
  return 0;
}
