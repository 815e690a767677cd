#pragma once

#include <cstdint>

namespace ldgen::kernels {

// Dense row-major matmul kernels. Every kernel *accumulates* into C, so
// callers zero the output buffer when they want a plain product and pass a
// live gradient buffer when they want +=.
//
// Each C element is reduced serially in ascending-k order in both the serial
// and OpenMP variants, so the two produce bit-identical results for any
// thread count. The OpenMP variants split work across independent output
// rows only; there are no cross-thread reductions.

// C[m x n] += A[m x k] * B[k x n]
void mm_nn_serial(const double *a, const double *b, double *c,
                  std::int64_t m, std::int64_t k, std::int64_t n);
void mm_nn_omp(const double *a, const double *b, double *c,
               std::int64_t m, std::int64_t k, std::int64_t n);

// C[m x n] += A[m x k] * B[n x k]^T
void mm_nt_serial(const double *a, const double *b, double *c,
                  std::int64_t m, std::int64_t k, std::int64_t n);
void mm_nt_omp(const double *a, const double *b, double *c,
               std::int64_t m, std::int64_t k, std::int64_t n);

// C[m x n] += A[k x m]^T * B[k x n]
void mm_tn_serial(const double *a, const double *b, double *c,
                  std::int64_t m, std::int64_t k, std::int64_t n);
void mm_tn_omp(const double *a, const double *b, double *c,
               std::int64_t m, std::int64_t k, std::int64_t n);

// Dispatchers: use the OpenMP variant when the product is large enough to
// amortize the fork and we are not already inside a parallel region
// (per-sample training graphs are themselves parallelized over samples).
void mm_nn(const double *a, const double *b, double *c,
           std::int64_t m, std::int64_t k, std::int64_t n);
void mm_nt(const double *a, const double *b, double *c,
           std::int64_t m, std::int64_t k, std::int64_t n);
void mm_tn(const double *a, const double *b, double *c,
           std::int64_t m, std::int64_t k, std::int64_t n);

// Work threshold (m*k*n) below which dispatch stays serial.
inline constexpr std::int64_t kParallelFlopCutoff = 1 << 16;

bool openmp_enabled();
int max_threads();

}  // namespace ldgen::kernels
