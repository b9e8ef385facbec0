void row_move(long* p, long x) {
  p += x;
  p -= 1;
  p++;
  p--;
  p = p + x;
  p = p - 2;
  p[0] = 9;
}
