#pragma once

#include "tgvflow/grid.hpp"

namespace tgvflow {

/// Per-pixel coefficients of the linearized brightness-constancy residual
///   r(j) = A(j) u1(j) + B(j) u2(j) + c(j).
struct LinearizedData {
  ScalarField A;
  ScalarField B;
  ScalarField c;

  int width() const noexcept { return A.width(); }
  int height() const noexcept { return A.height(); }
};

/// output(j) = f2 sampled bilinearly at j + ubar(j).
ScalarField warp_image(const ScalarField& f2, const DisplacementField& ubar);

/// First-order expansion of f2(j + u(j)) - f1(j) around ubar. Forward
/// differences of f2 are taken on the original grid and then sampled at the
/// warped positions.
LinearizedData linearize(const ScalarField& f1, const ScalarField& f2,
                         const DisplacementField& ubar);

/// sum_j |A u1 + B u2 + c|
double data_energy(const DisplacementField& u, const LinearizedData& L);

}  // namespace tgvflow
