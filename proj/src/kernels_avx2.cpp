#include "dynsel/kernels.hpp"

// AVX2 kernel variants. Compiled with -mavx2 but no -mfma: reductions use
// explicit mul+add so each of the four vector lanes matches one scalar
// accumulator, tails are folded per-lane, and the combine order is the same
// (a0+a1)+(a2+a3) as the scalar reference.

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

namespace dynsel::kernels {
namespace avx2 {

namespace {

inline double combine_with_tail(__m256d acc, const double* x, const double* y,
                                std::size_t base, std::size_t n, bool square_diff,
                                bool mul) {
  alignas(32) double a[4];
  _mm256_store_pd(a, acc);
  for (std::size_t j = 0; base + j < n; ++j) {
    if (square_diff) {
      const double d = x[base + j] - y[base + j];
      a[j] += d * d;
    } else if (mul) {
      a[j] += x[base + j] * y[base + j];
    } else {
      a[j] += x[base + j];
    }
  }
  return (a[0] + a[1]) + (a[2] + a[3]);
}

}  // namespace

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  return combine_with_tail(acc, x, y, i, n, false, true);
}

double sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  return combine_with_tail(acc, x, nullptr, i, n, false, false);
}

double sqdist(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  return combine_with_tail(acc, x, y, i, n, true, false);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_add_pd(_mm256_loadu_pd(y + i),
                                    _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, r);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale(double a, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) x[i] *= a;
}

void sgd_step(double* w, const double* g, std::size_t n, double lr, double wd) {
  const __m256d vlr = _mm256_set1_pd(lr);
  const __m256d vwd = _mm256_set1_pd(wd);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vw = _mm256_loadu_pd(w + i);
    const __m256d t = _mm256_add_pd(_mm256_loadu_pd(g + i), _mm256_mul_pd(vwd, vw));
    _mm256_storeu_pd(w + i, _mm256_sub_pd(vw, _mm256_mul_pd(vlr, t)));
  }
  for (; i < n; ++i) {
    const double t = g[i] + wd * w[i];
    w[i] = w[i] - lr * t;
  }
}

}  // namespace avx2

const Ops* avx2_ops_or_null() {
  static const Ops ops = {"avx2",       avx2::dot,   avx2::sum,
                          avx2::sqdist, avx2::axpy,  avx2::scale,
                          avx2::sgd_step};
  return &ops;
}

}  // namespace dynsel::kernels

#else

namespace dynsel::kernels {
const Ops* avx2_ops_or_null() { return nullptr; }
}  // namespace dynsel::kernels

#endif
