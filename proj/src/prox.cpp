#include "tgvflow/prox.hpp"

namespace tgvflow::prox {

void coupled_shrink(std::span<const double> x, double lam, std::span<double> out) noexcept {
  double norm2 = 0.0;
  for (double v : x) norm2 += v * v;
  const double norm = std::sqrt(norm2);
  if (norm <= lam) {
    for (double& v : out) v = 0.0;
    return;
  }
  const double scale = 1.0 - lam / norm;
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = x[k] * scale;
}

std::array<double, 4> coupled_shrink_nonneg_first(const std::array<double, 4>& x,
                                                  double lam) noexcept {
  if (x[0] >= 0.0) return coupled_shrink(x, lam);
  const auto tail = coupled_shrink(std::array<double, 3>{x[1], x[2], x[3]}, lam);
  return {0.0, tail[0], tail[1], tail[2]};
}

std::array<double, 2> generalized_shrink(double alpha, double beta, double gamma,
                                         const std::array<double, 2>& x) noexcept {
  if (alpha == 0.0 && beta == 0.0) return x;
  if (alpha == 0.0) {
    const double shift = gamma / beta;
    return {x[0], soft_shrink(x[1] + shift, std::abs(beta)) - shift};
  }
  if (beta == 0.0) {
    const double shift = gamma / alpha;
    return {soft_shrink(x[0] + shift, std::abs(alpha)) - shift, x[1]};
  }

  const double l1 = alpha * alpha;
  const double l2 = beta * beta;
  const double xt1 = alpha * x[0];
  const double xt2 = beta * x[1] + gamma;
  const double sum = xt1 + xt2;
  double z1;
  double z2;
  if (sum > l1 + l2) {
    z1 = xt1 - l1;
    z2 = xt2 - l2;
  } else if (sum < -(l1 + l2)) {
    z1 = xt1 + l1;
    z2 = xt2 + l2;
  } else {
    // Kink branch: z1 + z2 = 0.
    z1 = (xt1 * l2 - l1 * xt2) / (l1 + l2);
    z2 = (xt2 * l1 - l2 * xt1) / (l1 + l2);
  }
  return {z1 / alpha, (z2 - gamma) / beta};
}

}  // namespace tgvflow::prox
