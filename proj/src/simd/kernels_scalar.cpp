#include "aspect/simd/kernels.hpp"

namespace aspect::simd::scalar {

double dot(const double* a, const double* b, std::size_t n) noexcept {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void dot_rows(const double* query, const double* rows, std::size_t count,
              std::size_t dim, double* out) noexcept {
  for (std::size_t r = 0; r < count; ++r) out[r] = dot(query, rows + r * dim, dim);
}

}  // namespace aspect::simd::scalar
