#pragma once
// Data-parallel reductions used by the quadrature code paths.
//
// Every kernel has a scalar reference implementation; AVX2 (x86-64) and NEON
// (aarch64) variants are compiled when the toolchain supports them and picked
// at runtime. The active backend can be forced with IGH_SIMD=scalar|avx2|neon
// or set_backend().

#include <cstddef>
#include <span>
#include <string_view>

namespace igh::simd {

enum class Backend { Scalar, Avx2, Neon };

struct KernelTable {
  double (*sum)(const double* x, std::size_t n);
  double (*max_value)(const double* x, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*dot3)(const double* a, const double* b, const double* c, std::size_t n);
  double (*dot4)(const double* a, const double* b, const double* c, const double* d,
                 std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out = exp(a + b * x)
  void (*exp_affine)(const double* x, double a, double b, double* out, std::size_t n);
  // sum exp(x - shift)
  double (*exp_sum)(const double* x, double shift, std::size_t n);
};

const KernelTable& scalar_kernels();
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_kernels();
#endif
#if defined(__aarch64__)
const KernelTable& neon_kernels();
#endif

/// Backends usable on this CPU, scalar first.
std::span<const Backend> available_backends();
bool backend_available(Backend b);

Backend active_backend();
/// Throws std::invalid_argument if the backend is not available.
void set_backend(Backend b);
std::string_view backend_name(Backend b);

const KernelTable& kernels();
const KernelTable& kernels_for(Backend b);

// Thin span wrappers over the active table.
inline double sum(std::span<const double> x) { return kernels().sum(x.data(), x.size()); }
inline double max_value(std::span<const double> x) {
  return kernels().max_value(x.data(), x.size());
}
inline double dot(std::span<const double> a, std::span<const double> b) {
  return kernels().dot(a.data(), b.data(), a.size());
}
inline double dot3(std::span<const double> a, std::span<const double> b,
                   std::span<const double> c) {
  return kernels().dot3(a.data(), b.data(), c.data(), a.size());
}
inline double dot4(std::span<const double> a, std::span<const double> b,
                   std::span<const double> c, std::span<const double> d) {
  return kernels().dot4(a.data(), b.data(), c.data(), d.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  kernels().axpy(alpha, x.data(), y.data(), x.size());
}
inline void exp_affine(std::span<const double> x, double a, double b, std::span<double> out) {
  kernels().exp_affine(x.data(), a, b, out.data(), x.size());
}
inline double exp_sum(std::span<const double> x, double shift) {
  return kernels().exp_sum(x.data(), shift, x.size());
}

/// Numerically safe log(sum(w_a * exp(s_a))) with s_a already including log w_a.
double log_sum_exp(std::span<const double> s);

}  // namespace igh::simd
