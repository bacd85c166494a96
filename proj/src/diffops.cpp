#include "tgvflow/diffops.hpp"

#include "stencils.hpp"
#include "tgvflow/errors.hpp"

namespace tgvflow {

using namespace detail;

namespace {

void require_same(const ScalarField& a, const ScalarField& b) {
  if (!a.same_shape(b)) throw ValidationError("difference operator inputs differ in shape");
}

template <std::size_t N>
void require_consistent(const PlaneStack<N>& s) {
  if (!s.consistent()) throw ValidationError("difference operator inputs differ in shape");
}

}  // namespace

void grad_into(const ScalarField& p, ScalarField& gx, ScalarField& gy) {
  const int w = p.width();
  const int h = p.height();
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      gx(x, y) = fwd_dx(p, x, y);
      gy(x, y) = fwd_dy(p, x, y);
    }
  }
}

void grad_adjoint_into(const ScalarField& gx, const ScalarField& gy, ScalarField& out) {
  const int w = gx.width();
  const int h = gx.height();
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out(x, y) = fwd_adj(gx, gy, x, y);
}

void sym_grad_into(const ScalarField& a1, const ScalarField& a2, ScalarField& t0,
                   ScalarField& t1, ScalarField& t2) {
  const int w = a1.width();
  const int h = a1.height();
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      t0(x, y) = bwd_dx(a1, x, y);
      t1(x, y) = 0.5 * (bwd_dy(a1, x, y) + bwd_dx(a2, x, y));
      t2(x, y) = bwd_dy(a2, x, y);
    }
  }
}

void sym_grad_adjoint_into(const ScalarField& t0, const ScalarField& t1, const ScalarField& t2,
                           ScalarField& a1, ScalarField& a2) {
  const int w = t0.width();
  const int h = t0.height();
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      a1(x, y) = bwd_dx_adj(t0, x, y) + 0.5 * bwd_dy_adj(t1, x, y);
      a2(x, y) = 0.5 * bwd_dx_adj(t1, x, y) + bwd_dy_adj(t2, x, y);
    }
  }
}

GradPair grad_forward(const ScalarField& p) {
  GradPair g{ScalarField(p.width(), p.height()), ScalarField(p.width(), p.height())};
  grad_into(p, g.gx, g.gy);
  return g;
}

ScalarField grad_forward_adjoint(const ScalarField& gx, const ScalarField& gy) {
  require_same(gx, gy);
  ScalarField out(gx.width(), gx.height());
  grad_adjoint_into(gx, gy, out);
  return out;
}

HessianField sym_grad_backward(const ScalarField& a1, const ScalarField& a2) {
  require_same(a1, a2);
  auto t = HessianField::zeros(a1.width(), a1.height());
  sym_grad_into(a1, a2, t[0], t[1], t[2]);
  return t;
}

GradPair sym_grad_backward_adjoint(const HessianField& t) {
  require_consistent(t);
  GradPair a{ScalarField(t.width(), t.height()), ScalarField(t.width(), t.height())};
  sym_grad_adjoint_into(t[0], t[1], t[2], a.gx, a.gy);
  return a;
}

HessianField second_diff(const ScalarField& p) {
  const auto g = grad_forward(p);
  return sym_grad_backward(g.gx, g.gy);
}

ScalarField second_diff_adjoint(const HessianField& t) {
  const auto a = sym_grad_backward_adjoint(t);
  return grad_forward_adjoint(a.gx, a.gy);
}

GradientField grad(const DisplacementField& u) {
  require_same(u.u1, u.u2);
  auto g = GradientField::zeros(u.width(), u.height());
  grad_into(u.u1, g[0], g[1]);
  grad_into(u.u2, g[2], g[3]);
  return g;
}

DisplacementField grad_adjoint(const GradientField& g) {
  require_consistent(g);
  auto u = DisplacementField::zeros(g.width(), g.height());
  grad_adjoint_into(g[0], g[1], u.u1);
  grad_adjoint_into(g[2], g[3], u.u2);
  return u;
}

SymGradField sym_grad(const GradientField& a) {
  require_consistent(a);
  auto t = SymGradField::zeros(a.width(), a.height());
  sym_grad_into(a[0], a[1], t[0], t[1], t[2]);
  sym_grad_into(a[2], a[3], t[3], t[4], t[5]);
  return t;
}

GradientField sym_grad_adjoint(const SymGradField& t) {
  require_consistent(t);
  auto a = GradientField::zeros(t.width(), t.height());
  sym_grad_adjoint_into(t[0], t[1], t[2], a[0], a[1]);
  sym_grad_adjoint_into(t[3], t[4], t[5], a[2], a[3]);
  return a;
}

}  // namespace tgvflow
