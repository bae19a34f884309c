#include "dynsel/kernels.hpp"

// NEON kernel variants (aarch64). Two float64x2 accumulators play the roles
// of scalar accumulators {0,1} and {2,3}; tails fold per-lane and the combine
// order matches the scalar reference: (a0+a1)+(a2+a3).

#if defined(__aarch64__)

#include <arm_neon.h>

namespace dynsel::kernels {
namespace neon {

namespace {

inline double combine(float64x2_t lo, float64x2_t hi, double t0, double t1,
                      double t2, double t3) {
  double a0 = vgetq_lane_f64(lo, 0) + t0;
  double a1 = vgetq_lane_f64(lo, 1) + t1;
  double a2 = vgetq_lane_f64(hi, 0) + t2;
  double a3 = vgetq_lane_f64(hi, 1) + t3;
  return (a0 + a1) + (a2 + a3);
}

}  // namespace

double dot(const double* x, const double* y, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lo = vaddq_f64(lo, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
    hi = vaddq_f64(hi, vmulq_f64(vld1q_f64(x + i + 2), vld1q_f64(y + i + 2)));
  }
  double t[4] = {0, 0, 0, 0};
  for (std::size_t j = 0; i + j < n; ++j) t[j] = x[i + j] * y[i + j];
  return combine(lo, hi, t[0], t[1], t[2], t[3]);
}

double sum(const double* x, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lo = vaddq_f64(lo, vld1q_f64(x + i));
    hi = vaddq_f64(hi, vld1q_f64(x + i + 2));
  }
  double t[4] = {0, 0, 0, 0};
  for (std::size_t j = 0; i + j < n; ++j) t[j] = x[i + j];
  return combine(lo, hi, t[0], t[1], t[2], t[3]);
}

double sqdist(const double* x, const double* y, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float64x2_t d0 = vsubq_f64(vld1q_f64(x + i), vld1q_f64(y + i));
    const float64x2_t d1 = vsubq_f64(vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
    lo = vaddq_f64(lo, vmulq_f64(d0, d0));
    hi = vaddq_f64(hi, vmulq_f64(d1, d1));
  }
  double t[4] = {0, 0, 0, 0};
  for (std::size_t j = 0; i + j < n; ++j) {
    const double d = x[i + j] - y[i + j];
    t[j] = d * d;
  }
  return combine(lo, hi, t[0], t[1], t[2], t[3]);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale(double a, double* x, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

void sgd_step(double* w, const double* g, std::size_t n, double lr, double wd) {
  const float64x2_t vlr = vdupq_n_f64(lr);
  const float64x2_t vwd = vdupq_n_f64(wd);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t vw = vld1q_f64(w + i);
    const float64x2_t t = vaddq_f64(vld1q_f64(g + i), vmulq_f64(vwd, vw));
    vst1q_f64(w + i, vsubq_f64(vw, vmulq_f64(vlr, t)));
  }
  for (; i < n; ++i) {
    const double t = g[i] + wd * w[i];
    w[i] = w[i] - lr * t;
  }
}

}  // namespace neon

const Ops* neon_ops_or_null() {
  static const Ops ops = {"neon",       neon::dot,   neon::sum,
                          neon::sqdist, neon::axpy,  neon::scale,
                          neon::sgd_step};
  return &ops;
}

}  // namespace dynsel::kernels

#else

namespace dynsel::kernels {
const Ops* neon_ops_or_null() { return nullptr; }
}  // namespace dynsel::kernels

#endif
