#pragma once

#include <span>

namespace tvg {

/// Thomas algorithm for a tridiagonal system.
///
/// lower[i] multiplies x[i-1] (lower[0] unused), upper[i] multiplies x[i+1]
/// (upper[n-1] unused). rhs is overwritten with the solution; scratch must hold
/// n values. No pivoting, so the matrix should be diagonally dominant.
void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> rhs,
                       std::span<double> scratch);

}  // namespace tvg
