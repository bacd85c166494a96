#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>

namespace tgvflow::prox {

/// argmin_y lam*|y| + (y - x)^2 / 2
inline double soft_shrink(double x, double lam) noexcept {
  const double ax = std::abs(x);
  if (ax <= lam) return 0.0;
  return x * (1.0 - lam / ax);
}

/// argmin_y lam*||y||_2 + ||y - x||^2 / 2, written into out (may alias x).
void coupled_shrink(std::span<const double> x, double lam, std::span<double> out) noexcept;

template <std::size_t D>
std::array<double, D> coupled_shrink(const std::array<double, D>& x, double lam) noexcept {
  double norm2 = 0.0;
  for (double v : x) norm2 += v * v;
  const double norm = std::sqrt(norm2);
  std::array<double, D> y{};
  if (norm <= lam) return y;
  const double scale = 1.0 - lam / norm;
  for (std::size_t k = 0; k < D; ++k) y[k] = x[k] * scale;
  return y;
}

/// Coupled shrinkage with the extra constraint y[0] >= 0. A negative first
/// component is clamped to zero and the remaining three are shrunk jointly.
std::array<double, 4> coupled_shrink_nonneg_first(const std::array<double, 4>& x,
                                                  double lam) noexcept;

/// argmin_y |alpha*y1 + beta*y2 + gamma| + ||y - x||^2 / 2.
///
/// Four regimes: alpha = beta = 0 returns x; exactly one coefficient zero
/// reduces to a shifted soft shrinkage of the other component; otherwise the
/// substitution z1 = alpha*y1, z2 = beta*y2 + gamma turns the problem into
///   |z1 + z2| + (z1 - xt1)^2 / (2 l1) + (z2 - xt2)^2 / (2 l2)
/// with l1 = alpha^2, l2 = beta^2, whose minimizer has three branches
/// depending on the sign of xt1 + xt2 relative to l1 + l2.
std::array<double, 2> generalized_shrink(double alpha, double beta, double gamma,
                                         const std::array<double, 2>& x) noexcept;

}  // namespace tgvflow::prox
