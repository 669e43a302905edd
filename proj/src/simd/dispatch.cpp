#include <atomic>
#include <cstdlib>
#include <string>

#include "aspect/error.hpp"
#include "aspect/simd/kernels.hpp"

#ifndef ASPECT_HAVE_AVX2_KERNELS
// Non-x86 builds: the avx2 entry points exist but are never selected.
namespace aspect::simd::avx2 {
double dot(const double* a, const double* b, std::size_t n) noexcept {
  return scalar::dot(a, b, n);
}
void dot_rows(const double* query, const double* rows, std::size_t count,
              std::size_t dim, double* out) noexcept {
  scalar::dot_rows(query, rows, count, dim, out);
}
}  // namespace aspect::simd::avx2
#endif

namespace aspect::simd {

std::string_view to_string(Backend backend) {
  switch (backend) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
  }
  return "?";
}

bool avx2_available() noexcept {
#if defined(ASPECT_HAVE_AVX2_KERNELS)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported;
#else
  return false;
#endif
}

namespace {

Backend initial_backend() {
  if (const char* env = std::getenv("ASPECT_SIMD")) {
    if (std::string(env) == "scalar") return Backend::scalar;
  }
  return avx2_available() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& backend_slot() {
  static std::atomic<Backend> slot{initial_backend()};
  return slot;
}

}  // namespace

Backend active_backend() noexcept { return backend_slot().load(std::memory_order_relaxed); }

void set_backend(Backend backend) {
  if (backend == Backend::avx2 && !avx2_available()) {
    throw Error(ErrorKind::InvalidArgument, "AVX2 kernels are not available");
  }
  backend_slot().store(backend, std::memory_order_relaxed);
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::DimensionMismatch, "dot: operand sizes differ");
  }
  return active_backend() == Backend::avx2 ? avx2::dot(a.data(), b.data(), a.size())
                                           : scalar::dot(a.data(), b.data(), a.size());
}

void dot_rows(std::span<const double> query, std::span<const double> rows,
              std::size_t dim, std::span<double> out) {
  if (query.size() != dim || dim == 0 || rows.size() != out.size() * dim) {
    throw Error(ErrorKind::DimensionMismatch, "dot_rows: inconsistent shapes");
  }
  if (active_backend() == Backend::avx2) {
    avx2::dot_rows(query.data(), rows.data(), out.size(), dim, out.data());
  } else {
    scalar::dot_rows(query.data(), rows.data(), out.size(), dim, out.data());
  }
}

}  // namespace aspect::simd
