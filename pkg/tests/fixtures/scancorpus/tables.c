/* a fixed table of rows; the table handle never moves */
long tables(long n) {
  long** t = alloc(long*, 4);
  for (long r = 0; r < 4; r++) {
    t[r] = alloc(long, n);
    long* row = t[r];
    for (long c = 0; c < n; c++) {
      row[0] = r + c;
      row++;
    }
  }
  return t[0][0];
}
