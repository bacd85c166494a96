#include "tgvflow/dataterm.hpp"

#include <cmath>

#include "parallel.hpp"
#include "tgvflow/diffops.hpp"
#include "tgvflow/errors.hpp"

namespace tgvflow {

namespace {

void require_flow_finite(const DisplacementField& u) {
  if (!all_finite(u.u1) || !all_finite(u.u2))
    throw ValidationError("displacement field contains non-finite values");
}

}  // namespace

ScalarField warp_image(const ScalarField& f2, const DisplacementField& ubar) {
  if (!f2.same_shape(ubar.u1) || !ubar.consistent())
    throw ValidationError("warp_image: image and flow dimensions differ");
  require_flow_finite(ubar);
  const int w = f2.width();
  const int h = f2.height();
  ScalarField out(w, h);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      out(x, y) = sample_bilinear(f2, x + ubar.u1(x, y), y + ubar.u2(x, y));
  return out;
}

LinearizedData linearize(const ScalarField& f1, const ScalarField& f2,
                         const DisplacementField& ubar) {
  if (!f1.same_shape(f2) || !f1.same_shape(ubar.u1) || !ubar.consistent())
    throw ValidationError("linearize: image and flow dimensions differ");
  require_flow_finite(ubar);
  const int w = f1.width();
  const int h = f1.height();
  const auto g = grad_forward(f2);
  LinearizedData L{ScalarField(w, h), ScalarField(w, h), ScalarField(w, h)};
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double u1 = ubar.u1(x, y);
      const double u2 = ubar.u2(x, y);
      const double px = x + u1;
      const double py = y + u2;
      const double a = sample_bilinear(g.gx, px, py);
      const double b = sample_bilinear(g.gy, px, py);
      L.A(x, y) = a;
      L.B(x, y) = b;
      L.c(x, y) = -a * u1 - b * u2 + sample_bilinear(f2, px, py) - f1(x, y);
    }
  }
  return L;
}

double data_energy(const DisplacementField& u, const LinearizedData& L) {
  if (!u.u1.same_shape(L.A) || !u.consistent())
    throw ValidationError("data_energy: dimensions differ");
  const int w = L.width();
  return detail::row_sum(L.height(), [&](int y) {
    double s = 0.0;
    for (int x = 0; x < w; ++x)
      s += std::abs(L.A(x, y) * u.u1(x, y) + L.B(x, y) * u.u2(x, y) + L.c(x, y));
    return s;
  });
}

}  // namespace tgvflow
