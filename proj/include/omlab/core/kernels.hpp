#pragma once

namespace omlab::core::kernels {

// Worker threads used by the parallel matmul paths. 1 disables OpenMP
// dispatch; 0 resets to the hardware default. Thread count never changes
// results: every output element is accumulated in a fixed contraction order,
// so the parallel kernels are bit-identical to the serial references.
void set_threads(int n);
int threads();

// C[m,n] = A[m,k] @ B[k,n]           (accumulate: C += ...)
void matmul_nn(const double* a, const double* b, double* c, int m, int k, int n,
               bool accumulate = false);
// C[m,n] = A[m,k] @ B[n,k]^T
void matmul_nt(const double* a, const double* b, double* c, int m, int k, int n,
               bool accumulate = false);
// C[m,n] = A[k,m]^T @ B[k,n]
void matmul_tn(const double* a, const double* b, double* c, int m, int k, int n,
               bool accumulate = false);

// Serial reference implementations, kept for tests and benchmarks.
namespace serial {
void matmul_nn(const double* a, const double* b, double* c, int m, int k, int n,
               bool accumulate = false);
void matmul_nt(const double* a, const double* b, double* c, int m, int k, int n,
               bool accumulate = false);
void matmul_tn(const double* a, const double* b, double* c, int m, int k, int n,
               bool accumulate = false);
}  // namespace serial

}  // namespace omlab::core::kernels
