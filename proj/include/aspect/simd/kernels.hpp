#pragma once

// Dot-product kernels behind the similarity computations. The scalar
// versions are the reference: they accumulate in index-ascending order. The
// AVX2 versions reorder the summation and agree with the reference to within
// a few ulps of sum(|a_i * b_i|).

#include <cstddef>
#include <span>
#include <string_view>

namespace aspect::simd {

enum class Backend { scalar, avx2 };

std::string_view to_string(Backend backend);

/// True when the binary carries AVX2 kernels and the CPU supports them.
bool avx2_available() noexcept;

/// Backend used by the dispatched kernels. Defaults to the best available
/// one; ASPECT_SIMD=scalar forces the reference path.
Backend active_backend() noexcept;

/// Overrides the dispatched backend. Throws InvalidArgument when the
/// requested backend is not available on this machine.
void set_backend(Backend backend);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n) noexcept;
void dot_rows(const double* query, const double* rows, std::size_t count,
              std::size_t dim, double* out) noexcept;
}  // namespace scalar

namespace avx2 {
// Callable only when avx2_available().
double dot(const double* a, const double* b, std::size_t n) noexcept;
void dot_rows(const double* query, const double* rows, std::size_t count,
              std::size_t dim, double* out) noexcept;
}  // namespace avx2

double dot(std::span<const double> a, std::span<const double> b);

/// out[r] = dot(query, rows[r*dim .. r*dim+dim)) for every row.
void dot_rows(std::span<const double> query, std::span<const double> rows,
              std::size_t dim, std::span<double> out);

}  // namespace aspect::simd
