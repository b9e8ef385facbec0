long row_deref(long* p) {
  *p = 3;
  return *p;
}
