void callee(long* r);

void row_call(long* p) {
  p += 1;
  callee(p);
}
