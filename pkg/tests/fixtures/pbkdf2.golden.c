long* pbkdf2_fixture(long n, long cplen) {
  long* p = alloc(long, 64);
  long p_adj = 0;
  long* data = alloc(long, 64);
  long data_adj = 0;
  for (long j = 0; j < 64; j++) {
    p[j + p_adj] = j * 3 + 1;
    data[j + data_adj] = j * 7 + 2;
  }
  pbkdf2_mix(p + p_adj, data + data_adj, cplen, n);
  return p + p_adj;
}

void pbkdf2_mix(long* p, long* data, long cplen, long n) {
  long p_adj = 0;
  long data_adj = 0;
  for (long i = 0; i < cplen * n; i += cplen) {
    for (long k = 0; k < cplen; k++) {
      p[k + p_adj] = p[k + p_adj] ^ data[k + data_adj];
    }
    p_adj += cplen;
  }
}
