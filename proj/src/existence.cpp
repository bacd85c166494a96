#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "tgvflow/diffops.hpp"
#include "tgvflow/errors.hpp"
#include "tgvflow/solver.hpp"

namespace tgvflow {

// Minimizers of the TGV energy exist when [A B] is injective on the kernel
// of symgrad o grad. Equivalently the stacked matrix [[A B]; symgrad o grad]
// has full column rank 2N.
bool existence_check(const LinearizedData& L, int max_dim) {
  const int w = L.width();
  const int h = L.height();
  if (w > max_dim || h > max_dim) throw ValidationError("diagnostic limited to small grids");
  const Eigen::Index n = static_cast<Eigen::Index>(w) * h;

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(7 * n, 2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double a = L.A[static_cast<std::size_t>(j)];
    const double b = L.B[static_cast<std::size_t>(j)];
    // Row scaling leaves the kernel unchanged and keeps the rank threshold
    // meaningful when image gradients are small.
    const double scale = std::max(std::abs(a), std::abs(b));
    if (scale > 0.0) {
      m(j, j) = a / scale;
      m(j, n + j) = b / scale;
    }
  }

  // Columns of symgrad o grad from unit vectors.
  auto unit = DisplacementField::zeros(w, h);
  for (Eigen::Index col = 0; col < 2 * n; ++col) {
    auto& plane = col < n ? unit.u1 : unit.u2;
    const auto idx = static_cast<std::size_t>(col < n ? col : col - n);
    plane[idx] = 1.0;
    const auto t = sym_grad(grad(unit));
    for (std::size_t k = 0; k < 6; ++k)
      for (Eigen::Index r = 0; r < n; ++r)
        m(n + static_cast<Eigen::Index>(k) * n + r, col) = t[k][static_cast<std::size_t>(r)];
    plane[idx] = 0.0;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
  qr.setThreshold(1e-10);
  return qr.rank() == 2 * n;
}

}  // namespace tgvflow
