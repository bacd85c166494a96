#pragma once

#include <utility>

#include "tgvflow/grid.hpp"

namespace tgvflow {

// Finite-difference operators and their exact adjoints under the Euclidean
// inner product.
//
//   forward   (dx p)(x, y) = p(x+1, y) - p(x, y)   if x+1 < W, else 0
//   backward  (dx~ p)(x, y) = p(x, y) - p(x-1, y)  if 1 <= x <= W-2, else 0
//
// The backward stencil is zeroed unless both horizontal neighbours exist.
// The y-direction versions are analogous.

struct GradPair {
  ScalarField gx;
  ScalarField gy;
};

GradPair grad_forward(const ScalarField& p);
ScalarField grad_forward_adjoint(const ScalarField& gx, const ScalarField& gy);

/// (dx~ a1, (dy~ a1 + dx~ a2)/2, dy~ a2)
HessianField sym_grad_backward(const ScalarField& a1, const ScalarField& a2);
GradPair sym_grad_backward_adjoint(const HessianField& t);

/// sym_grad_backward applied to grad_forward of one plane.
HessianField second_diff(const ScalarField& p);
ScalarField second_diff_adjoint(const HessianField& t);

// Vector-valued versions: the scalar operators applied to each displacement
// component (resp. each 2-plane block). The *_into forms write into
// preallocated outputs of matching shape and are what the solver uses.

GradientField grad(const DisplacementField& u);
DisplacementField grad_adjoint(const GradientField& g);
SymGradField sym_grad(const GradientField& a);
GradientField sym_grad_adjoint(const SymGradField& t);

void grad_into(const ScalarField& p, ScalarField& gx, ScalarField& gy);
void grad_adjoint_into(const ScalarField& gx, const ScalarField& gy, ScalarField& out);
void sym_grad_into(const ScalarField& a1, const ScalarField& a2, ScalarField& t0,
                   ScalarField& t1, ScalarField& t2);
void sym_grad_adjoint_into(const ScalarField& t0, const ScalarField& t1, const ScalarField& t2,
                           ScalarField& a1, ScalarField& a2);

}  // namespace tgvflow
