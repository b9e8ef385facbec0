/* sparse rows carved out of one contiguous buffer via cursor pointers */
struct mat {
  long* nnz_in_row;
  double** ptr_to_vals;
  long** ptr_to_inds;
};

struct mat* build_matrix(long nrow, long max_nnz) {
  struct mat* A = alloc(struct mat, 1);
  A->nnz_in_row = alloc(long, nrow);
  A->ptr_to_vals = alloc(double*, nrow);
  A->ptr_to_inds = alloc(long*, nrow);
  double* curvalptr = alloc(double, max_nnz * nrow);
  long* curindptr = alloc(long, max_nnz * nrow);
  for (long currow = 0; currow < nrow; currow++) {
    A->ptr_to_vals[currow] = curvalptr;
    A->ptr_to_inds[currow] = curindptr;
    long nnz_row = 0;
    for (long curcol = 0; curcol < max_nnz; curcol++) {
      *curvalptr = 27.0;
      *curindptr = curcol;
      curvalptr++;
      curindptr++;
      nnz_row++;
    }
    A->nnz_in_row[currow] = nnz_row;
  }
  return A;
}
