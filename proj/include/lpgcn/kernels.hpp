#pragma once

#include <cstddef>

// Dense double-precision inner loops used by the trainer, the graph
// propagation and the power iteration. Scalar reference kernels always
// exist; an AVX2 variant is selected once at startup when the CPU supports
// it. Both variants of each kernel are exported so tests can check them
// against each other on the same inputs.

namespace lpgcn::kernels {

struct Ops {
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum_sq)(const double* v, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  void (*scale)(double alpha, double* v, std::size_t n);
  const char* name;
};

// Scalar reference implementations (sequential accumulation order).
const Ops& scalar_ops();

// Best SIMD implementation compiled in and supported by this CPU;
// falls back to scalar_ops() when there is none.
const Ops& simd_ops();

// Dispatch table used by the wrappers below. Defaults to simd_ops().
const Ops& active();

// Pin the dispatch to the scalar kernels (mainly for A/B testing).
void force_scalar(bool on);

inline double dot(const double* a, const double* b, std::size_t n) {
  return active().dot(a, b, n);
}
inline double sum_sq(const double* v, std::size_t n) {
  return active().sum_sq(v, n);
}
// y += alpha * x
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active().axpy(alpha, x, y, n);
}
// v *= alpha
inline void scale(double alpha, double* v, std::size_t n) {
  active().scale(alpha, v, n);
}

}  // namespace lpgcn::kernels
