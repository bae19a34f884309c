#pragma once

#include <cstddef>
#include <string>

// Data-parallel inner loops used by the nets, cluster, fusion and learner
// modules. Each kernel has a scalar reference implementation and SIMD
// variants (AVX2 on x86-64, NEON on aarch64) selected once at runtime.
//
// Every reduction uses the same fixed order regardless of variant: four
// independent accumulators over 4-element blocks, tail elements folded into
// accumulators 0..r-1, final combine (a0+a1)+(a2+a3). With FP contraction
// disabled this makes scalar and SIMD results bit-identical, which the
// equivalence tests assert with operator==.

namespace dynsel::kernels {

struct Ops {
  const char* name;
  // sum_i x[i]*y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // sum_i x[i]
  double (*sum)(const double* x, std::size_t n);
  // sum_i (x[i]-y[i])^2
  double (*sqdist)(const double* x, const double* y, std::size_t n);
  // y[i] += a*x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // x[i] *= a
  void (*scale)(double a, double* x, std::size_t n);
  // w[i] -= lr*(g[i] + wd*w[i])
  void (*sgd_step)(double* w, const double* g, std::size_t n, double lr, double wd);
};

const Ops& scalar_ops();
bool avx2_available();
bool neon_available();

// The variant picked at startup: best available, unless the DYNSEL_KERNELS
// environment variable ("scalar", "avx2", "neon") or force_backend() says
// otherwise.
const Ops& active();
void force_backend(const std::string& name);

// Row-major matrix-vector product: out[r] = dot(W row r, x).
inline void matvec(const double* w, std::size_t rows, std::size_t cols,
                   const double* x, double* out) {
  const Ops& k = active();
  for (std::size_t r = 0; r < rows; ++r) out[r] = k.dot(w + r * cols, x, cols);
}

// Rank-1 accumulate: G[r + :] += u[r] * x for each row r with u[r] != 0.
inline void outer_acc(const double* u, std::size_t rows, std::size_t cols,
                      const double* x, double* g) {
  const Ops& k = active();
  for (std::size_t r = 0; r < rows; ++r) {
    if (u[r] != 0.0) k.axpy(u[r], x, g + r * cols, cols);
  }
}

}  // namespace dynsel::kernels
