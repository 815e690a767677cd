#include "ldgen/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ldgen::kernels {

bool openmp_enabled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace {

inline bool use_parallel(std::int64_t m, std::int64_t k, std::int64_t n) {
#ifdef _OPENMP
  return m * k * n >= kParallelFlopCutoff && !omp_in_parallel() &&
         omp_get_max_threads() > 1;
#else
  (void)m;
  (void)k;
  (void)n;
  return false;
#endif
}

// Shared row bodies keep the serial and OpenMP variants textually identical
// per output row, which is what makes them bit-exact against each other.

inline void nn_row(const double *a, const double *b, double *c,
                   std::int64_t i, std::int64_t k, std::int64_t n) {
  const double *arow = a + i * k;
  double *crow = c + i * n;
  for (std::int64_t p = 0; p < k; ++p) {
    const double av = arow[p];
    const double *brow = b + p * n;
    for (std::int64_t j = 0; j < n; ++j) crow[j] += av * brow[j];
  }
}

inline void nt_row(const double *a, const double *b, double *c,
                   std::int64_t i, std::int64_t k, std::int64_t n) {
  const double *arow = a + i * k;
  double *crow = c + i * n;
  for (std::int64_t j = 0; j < n; ++j) {
    const double *brow = b + j * k;
    double acc = 0.0;
    for (std::int64_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
    crow[j] += acc;
  }
}

inline void tn_row(const double *a, const double *b, double *c,
                   std::int64_t i, std::int64_t m, std::int64_t k,
                   std::int64_t n) {
  double *crow = c + i * n;
  for (std::int64_t p = 0; p < k; ++p) {
    const double av = a[p * m + i];
    const double *brow = b + p * n;
    for (std::int64_t j = 0; j < n; ++j) crow[j] += av * brow[j];
  }
}

}  // namespace

void mm_nn_serial(const double *a, const double *b, double *c,
                  std::int64_t m, std::int64_t k, std::int64_t n) {
  for (std::int64_t i = 0; i < m; ++i) nn_row(a, b, c, i, k, n);
}

void mm_nn_omp(const double *a, const double *b, double *c,
               std::int64_t m, std::int64_t k, std::int64_t n) {
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < m; ++i) nn_row(a, b, c, i, k, n);
}

void mm_nt_serial(const double *a, const double *b, double *c,
                  std::int64_t m, std::int64_t k, std::int64_t n) {
  for (std::int64_t i = 0; i < m; ++i) nt_row(a, b, c, i, k, n);
}

void mm_nt_omp(const double *a, const double *b, double *c,
               std::int64_t m, std::int64_t k, std::int64_t n) {
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < m; ++i) nt_row(a, b, c, i, k, n);
}

void mm_tn_serial(const double *a, const double *b, double *c,
                  std::int64_t m, std::int64_t k, std::int64_t n) {
  for (std::int64_t i = 0; i < m; ++i) tn_row(a, b, c, i, m, k, n);
}

void mm_tn_omp(const double *a, const double *b, double *c,
               std::int64_t m, std::int64_t k, std::int64_t n) {
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < m; ++i) tn_row(a, b, c, i, m, k, n);
}

void mm_nn(const double *a, const double *b, double *c,
           std::int64_t m, std::int64_t k, std::int64_t n) {
  if (use_parallel(m, k, n)) {
    mm_nn_omp(a, b, c, m, k, n);
  } else {
    mm_nn_serial(a, b, c, m, k, n);
  }
}

void mm_nt(const double *a, const double *b, double *c,
           std::int64_t m, std::int64_t k, std::int64_t n) {
  if (use_parallel(m, k, n)) {
    mm_nt_omp(a, b, c, m, k, n);
  } else {
    mm_nt_serial(a, b, c, m, k, n);
  }
}

void mm_tn(const double *a, const double *b, double *c,
           std::int64_t m, std::int64_t k, std::int64_t n) {
  if (use_parallel(m, k, n)) {
    mm_tn_omp(a, b, c, m, k, n);
  } else {
    mm_tn_serial(a, b, c, m, k, n);
  }
}

}  // namespace ldgen::kernels
