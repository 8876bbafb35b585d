#include "tvg/tridiagonal.hpp"

#include <stdexcept>

namespace tvg {

void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> rhs,
                       std::span<double> scratch) {
  const std::size_t n = diag.size();
  if (n == 0 || lower.size() != n || upper.size() != n || rhs.size() != n ||
      scratch.size() < n) {
    throw std::invalid_argument("tridiagonal: inconsistent sizes");
  }
  // Forward sweep
  scratch[0] = upper[0] / diag[0];
  rhs[0] /= diag[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double denom = 1.0 / (diag[i] - lower[i] * scratch[i - 1]);
    scratch[i] = upper[i] * denom;
    rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) * denom;
  }
  // Back substitution
  for (std::size_t i = n - 1; i > 0; --i) rhs[i - 1] -= scratch[i - 1] * rhs[i];
}

}  // namespace tvg
