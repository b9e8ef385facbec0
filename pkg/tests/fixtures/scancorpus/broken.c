/* deliberately outside the subset: scanners must flag, not drop, this */
int main(int argc) {
  switch (argc) {
  }
  return 0;
}
