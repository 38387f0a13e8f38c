#include "igh/simd.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace igh::simd {
namespace {

std::vector<Backend> detect() {
  std::vector<Backend> out{Backend::Scalar};
#if defined(__x86_64__) || defined(_M_X64)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) out.push_back(Backend::Avx2);
#endif
#if defined(__aarch64__)
  out.push_back(Backend::Neon);
#endif
  return out;
}

const std::vector<Backend>& detected() {
  static const std::vector<Backend> list = detect();
  return list;
}

Backend initial_backend() {
  if (const char* env = std::getenv("IGH_SIMD")) {
    const std::string want(env);
    for (Backend b : detected())
      if (backend_name(b) == want) return b;
  }
  return detected().back();
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> b{initial_backend()};
  return b;
}

}  // namespace

std::span<const Backend> available_backends() { return detected(); }

bool backend_available(Backend b) {
  for (Backend x : detected())
    if (x == b) return true;
  return false;
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (!backend_available(b))
    throw std::invalid_argument("SIMD backend not available: " + std::string(backend_name(b)));
  current().store(b, std::memory_order_relaxed);
}

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "unknown";
}

const KernelTable& kernels_for(Backend b) {
  switch (b) {
#if defined(__x86_64__) || defined(_M_X64)
    case Backend::Avx2: return avx2_kernels();
#endif
#if defined(__aarch64__)
    case Backend::Neon: return neon_kernels();
#endif
    default: return scalar_kernels();
  }
}

const KernelTable& kernels() { return kernels_for(active_backend()); }

double log_sum_exp(std::span<const double> s) {
  if (s.empty()) return -std::numeric_limits<double>::infinity();
  const double m = max_value(s);
  if (!std::isfinite(m)) return m;
  return m + std::log(exp_sum(s, m));
}

}  // namespace igh::simd
