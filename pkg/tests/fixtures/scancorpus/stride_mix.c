void stride_mix(long* p, long* data, long cplen, long n) {
  for (long i = 0; i < cplen * n; i += cplen) {
    for (long k = 0; k < cplen; k++) {
      p[k] = p[k] ^ data[k];
    }
    p += cplen;
  }
}
