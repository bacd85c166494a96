#pragma once

// Per-pixel difference stencils shared by the operator and solver kernels.

#include "tgvflow/grid.hpp"

namespace tgvflow::detail {

inline bool interior(int i, int n) noexcept { return i >= 1 && i <= n - 2; }

inline double fwd_dx(const ScalarField& p, int x, int y) noexcept {
  return x + 1 < p.width() ? p(x + 1, y) - p(x, y) : 0.0;
}

inline double fwd_dy(const ScalarField& p, int x, int y) noexcept {
  return y + 1 < p.height() ? p(x, y + 1) - p(x, y) : 0.0;
}

/// (dx^T gx + dy^T gy)(x, y)
inline double fwd_adj(const ScalarField& gx, const ScalarField& gy, int x, int y) noexcept {
  double v = 0.0;
  if (x >= 1) v += gx(x - 1, y);
  if (x + 1 < gx.width()) v -= gx(x, y);
  if (y >= 1) v += gy(x, y - 1);
  if (y + 1 < gy.height()) v -= gy(x, y);
  return v;
}

inline double bwd_dx(const ScalarField& p, int x, int y) noexcept {
  return interior(x, p.width()) ? p(x, y) - p(x - 1, y) : 0.0;
}

inline double bwd_dy(const ScalarField& p, int x, int y) noexcept {
  return interior(y, p.height()) ? p(x, y) - p(x, y - 1) : 0.0;
}

inline double bwd_dx_adj(const ScalarField& v, int x, int y) noexcept {
  const int w = v.width();
  double r = 0.0;
  if (interior(x, w)) r += v(x, y);
  if (interior(x + 1, w)) r -= v(x + 1, y);
  return r;
}

inline double bwd_dy_adj(const ScalarField& v, int x, int y) noexcept {
  const int h = v.height();
  double r = 0.0;
  if (interior(y, h)) r += v(x, y);
  if (interior(y + 1, h)) r -= v(x, y + 1);
  return r;
}

}  // namespace tgvflow::detail
