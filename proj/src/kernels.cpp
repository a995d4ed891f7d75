#include "lpgcn/kernels.hpp"

#include <atomic>

namespace lpgcn::kernels {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_sq(const double* v, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += v[i] * v[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, double* v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) v[i] *= alpha;
}

}  // namespace scalar

#if defined(LPGCN_HAVE_AVX2_TU)
namespace avx2 {
// Defined in kernels_avx2.cpp (compiled with -mavx2 -mfma).
double dot(const double* a, const double* b, std::size_t n);
double sum_sq(const double* v, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* v, std::size_t n);
bool supported();
}  // namespace avx2
#endif

const Ops& scalar_ops() {
  static const Ops ops{scalar::dot, scalar::sum_sq, scalar::axpy,
                       scalar::scale, "scalar"};
  return ops;
}

const Ops& simd_ops() {
#if defined(LPGCN_HAVE_AVX2_TU)
  static const Ops avx2_table{avx2::dot, avx2::sum_sq, avx2::axpy,
                              avx2::scale, "avx2"};
  static const Ops& chosen = avx2::supported() ? avx2_table : scalar_ops();
  return chosen;
#else
  return scalar_ops();
#endif
}

namespace {
std::atomic<bool> g_force_scalar{false};
}

void force_scalar(bool on) { g_force_scalar.store(on); }

const Ops& active() {
  return g_force_scalar.load() ? scalar_ops() : simd_ops();
}

}  // namespace lpgcn::kernels
