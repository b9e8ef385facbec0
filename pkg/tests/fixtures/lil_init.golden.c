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
  for (long currow = 0; currow < nrow; currow++) {
    A->ptr_to_vals[currow] = alloc(double, max_nnz);
    long curvalptr_adj = 0;
    A->ptr_to_inds[currow] = alloc(long, max_nnz);
    long curindptr_adj = 0;
    long nnz_row = 0;
    for (long curcol = 0; curcol < max_nnz; curcol++) {
      A->ptr_to_vals[currow][curvalptr_adj] = 27.0;
      A->ptr_to_inds[currow][curindptr_adj] = curcol;
      curvalptr_adj++;
      curindptr_adj++;
      nnz_row++;
    }
    A->nnz_in_row[currow] = nnz_row;
  }
  return A;
}
