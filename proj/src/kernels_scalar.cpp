#include "dynsel/kernels.hpp"

// Scalar reference kernels. These define the arithmetic order the SIMD
// variants must reproduce exactly.

namespace dynsel::kernels {
namespace scalar {

double dot(const double* x, const double* y, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc[0] += x[i] * y[i];
    acc[1] += x[i + 1] * y[i + 1];
    acc[2] += x[i + 2] * y[i + 2];
    acc[3] += x[i + 3] * y[i + 3];
  }
  for (std::size_t j = 0; i + j < n; ++j) acc[j] += x[i + j] * y[i + j];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

double sum(const double* x, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc[0] += x[i];
    acc[1] += x[i + 1];
    acc[2] += x[i + 2];
    acc[3] += x[i + 3];
  }
  for (std::size_t j = 0; i + j < n; ++j) acc[j] += x[i + j];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

double sqdist(const double* x, const double* y, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const double d0 = x[i] - y[i];
    const double d1 = x[i + 1] - y[i + 1];
    const double d2 = x[i + 2] - y[i + 2];
    const double d3 = x[i + 3] - y[i + 3];
    acc[0] += d0 * d0;
    acc[1] += d1 * d1;
    acc[2] += d2 * d2;
    acc[3] += d3 * d3;
  }
  for (std::size_t j = 0; i + j < n; ++j) {
    const double d = x[i + j] - y[i + j];
    acc[j] += d * d;
  }
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void sgd_step(double* w, const double* g, std::size_t n, double lr, double wd) {
  for (std::size_t i = 0; i < n; ++i) {
    const double t = g[i] + wd * w[i];
    w[i] = w[i] - lr * t;
  }
}

}  // namespace scalar

const Ops& scalar_ops() {
  static const Ops ops = {"scalar",      scalar::dot,   scalar::sum,
                          scalar::sqdist, scalar::axpy, scalar::scale,
                          scalar::sgd_step};
  return ops;
}

}  // namespace dynsel::kernels
