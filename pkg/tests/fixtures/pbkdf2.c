/* block-mix loop: the outer loop advances the output window each round */
long* pbkdf2_fixture(long n, long cplen) {
  long* p = alloc(long, 64);
  long* data = alloc(long, 64);
  for (long j = 0; j < 64; j++) {
    p[j] = j * 3 + 1;
    data[j] = j * 7 + 2;
  }
  pbkdf2_mix(p, data, cplen, n);
  return p;
}

void pbkdf2_mix(long* p, long* data, long cplen, long n) {
  for (long i = 0; i < cplen * n; i += cplen) {
    for (long k = 0; k < cplen; k++) {
      p[k] = p[k] ^ data[k];
    }
    p += cplen;
  }
}
