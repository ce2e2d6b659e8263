#pragma once

// Finite-difference and local-quadrature weights on integer-offset stencils.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace hardy::stencil {

/// Fornberg's recursion: weights w[j] such that sum_j w[j] f(x[j]) ~ f^(m)(z).
/// Exact for polynomials of degree < x.size().
inline std::vector<double> fd_weights(double z, std::span<const double> x, int m) {
  const std::size_t n = x.size();
  if (n == 0 || m < 0 || static_cast<std::size_t>(m) >= n)
    throw std::invalid_argument("fd_weights: stencil too small for derivative order");
  // c[j][k]: weight of node j for derivative k
  std::vector<std::vector<long double>> c(n, std::vector<long double>(m + 1, 0.0L));
  long double c1 = 1.0L;
  long double c4 = x[0] - z;
  c[0][0] = 1.0L;
  for (std::size_t i = 1; i < n; ++i) {
    const int mn = std::min<int>(static_cast<int>(i), m);
    long double c2 = 1.0L;
    const long double c5 = c4;
    c4 = x[i] - z;
    for (std::size_t j = 0; j < i; ++j) {
      const long double c3 = static_cast<long double>(x[i]) - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) w[j] = static_cast<double>(c[j][m]);
  return w;
}

/// Weights w[j] such that sum_j w[j] f(x[j]) ~ int_lo^hi f, from the interpolating
/// polynomial through the nodes x (moment equations solved in extended precision).
inline std::vector<double> integration_weights(std::span<const double> x, double lo, double hi) {
  const std::size_t n = x.size();
  std::vector<std::vector<long double>> m(n, std::vector<long double>(n + 1));
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) m[k][j] = std::pow(static_cast<long double>(x[j]), k);
    m[k][n] = (std::pow(static_cast<long double>(hi), k + 1) -
               std::pow(static_cast<long double>(lo), k + 1)) /
              static_cast<long double>(k + 1);
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
    std::swap(m[col], m[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const long double f = m[r][col] / m[col][col];
      for (std::size_t k = col; k <= n; ++k) m[r][k] -= f * m[col][k];
    }
  }
  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) w[j] = static_cast<double>(m[j][n] / m[j][j]);
  return w;
}

/// Lagrange basis values at z for nodes x.
inline std::vector<double> lagrange_weights(double z, std::span<const double> x) {
  return fd_weights(z, x, 0);
}

}  // namespace hardy::stencil
