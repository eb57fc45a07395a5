#pragma once

// Dense product kernels. Each kernel exists twice: a serial reference in
// kernels::serial and an OpenMP version in kernels::parallel. Both walk the
// reduction index in the same order for every output entry, so their results
// are bitwise identical for any thread count.
//
// Entries of the left operand that are exactly zero are skipped. This is what
// makes one-hot and {0,1} inputs cheap, and it never changes a finite result.

#include "egdlab/matrix.hpp"

namespace egdlab::kernels {

namespace serial {
DenseMatrix gemm_nn(const DenseMatrix& a, const DenseMatrix& b);  // a * b
DenseMatrix gemm_nt(const DenseMatrix& a, const DenseMatrix& b);  // a * b^T
DenseMatrix gemm_tn(const DenseMatrix& a, const DenseMatrix& b);  // a^T * b
void relu_inplace(DenseMatrix& m);
}  // namespace serial

namespace parallel {
DenseMatrix gemm_nn(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix gemm_nt(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix gemm_tn(const DenseMatrix& a, const DenseMatrix& b);
void relu_inplace(DenseMatrix& m);
}  // namespace parallel

// Thread count used by the parallel kernels; n <= 0 restores one per processor.
void set_num_threads(int n);
int num_threads();

}  // namespace egdlab::kernels
