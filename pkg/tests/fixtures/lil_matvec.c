/* y = A x over the row-sliced sparse matrix; values kept integral so sums
   are exact in double precision */
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
      *curindptr = currow + curcol;
      curvalptr++;
      curindptr++;
      nnz_row++;
    }
    A->nnz_in_row[currow] = nnz_row;
  }
  return A;
}

double* matvec_fixture(long nrow, long max_nnz) {
  struct mat* A = build_matrix(nrow, max_nnz);
  long ncol = nrow + max_nnz;
  double* x = alloc(double, ncol);
  for (long c = 0; c < ncol; c++) {
    x[c] = c * 2 + 1;
  }
  double* y = alloc(double, nrow);
  for (long i = 0; i < nrow; i++) {
    double sum = 0.0;
    long cur_nnz = A->nnz_in_row[i];
    for (long j = 0; j < cur_nnz; j++) {
      sum += A->ptr_to_vals[i][j] * x[A->ptr_to_inds[i][j]];
    }
    y[i] = sum;
  }
  return y;
}
