/* the table pointer itself is advanced: beyond the supported shape */
long iter_double(int c, long i) {
  long* a = alloc(long, 10);
  long* b = alloc(long, 10);
  long** p = alloc(long*, 2);
  p[0] = a;
  p[1] = b;
  if (c) {
    p++;
  }
  long x = (*p)[i];
  return x;
}
