#include "tgvflow/solver.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <string>

#include "parallel.hpp"
#include "stencils.hpp"
#include "tgvflow/diffops.hpp"
#include "tgvflow/errors.hpp"
#include "tgvflow/prox.hpp"

namespace tgvflow {

using namespace detail;

namespace {

constexpr double kDivergenceBound = 1e8;

void require_shape(const DisplacementField& u, const LinearizedData& L) {
  if (!u.consistent() || !u.u1.same_shape(L.A))
    throw ValidationError("solver: state and data dimensions differ");
}

// Running max of |v| that turns NaN into infinity; std::max would drop it.
inline double fold_abs(double m, double v) noexcept {
  return std::isnan(v) ? INFINITY : std::max(m, std::abs(v));
}

inline void check_bound(double magnitude) {
  // Written so that NaN fails the comparison.
  if (!(magnitude <= kDivergenceBound)) throw DivergenceError("divergence detected");
}

template <std::size_t N>
double plane_group_norm(const PlaneStack<N>& s, int x, int y) noexcept {
  double n2 = 0.0;
  for (std::size_t k = 0; k < N; ++k) n2 += s[k](x, y) * s[k](x, y);
  return std::sqrt(n2);
}

template <std::size_t N>
double l21_norm(const PlaneStack<N>& s) {
  const int w = s.width();
  return row_sum(s.height(), [&](int y) {
    double acc = 0.0;
    for (int x = 0; x < w; ++x) acc += plane_group_norm(s, x, y);
    return acc;
  });
}

template <std::size_t N>
double squared_norm(const PlaneStack<N>& s) {
  const int w = s.width();
  return row_sum(s.height(), [&](int y) {
    double acc = 0.0;
    for (int x = 0; x < w; ++x)
      for (std::size_t k = 0; k < N; ++k) acc += s[k](x, y) * s[k](x, y);
    return acc;
  });
}

}  // namespace

std::string_view prior_name(Prior p) noexcept {
  switch (p) {
    case Prior::H1: return "h1";
    case Prior::TV: return "tv";
    case Prior::TV2: return "tv2";
    case Prior::TVTV2: return "tvtv2";
    case Prior::IC: return "ic";
    case Prior::TGV: return "tgv";
  }
  return "?";
}

Prior parse_prior(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (Prior p : {Prior::H1, Prior::TV, Prior::TV2, Prior::TVTV2, Prior::IC, Prior::TGV})
    if (lower == prior_name(p)) return p;
  throw ValidationError("unknown prior '" + std::string(name) + "'");
}

void SolverParams::validate() const {
  if (!(lambda1 > 0.0)) throw ValidationError("lambda1 must be > 0");
  if (!(lambda2 > 0.0)) throw ValidationError("lambda2 must be > 0");
  if (!(lambda3 >= 0.0)) throw ValidationError("lambda3 must be >= 0");
  if (!(tau1 > 0.0) || !(tau2 > 0.0)) throw ValidationError("step sizes must be > 0");
  if (!(theta >= 0.0 && theta <= 1.0)) throw ValidationError("theta must lie in [0,1]");
  if (iterations < 1) throw ValidationError("iterations must be positive");
  if (energy_every < 1) throw ValidationError("energy_every must be positive");
  if (constrain_positive_x && prior != Prior::TGV)
    throw ValidationError("the positivity constraint requires the tgv prior");
}

SolverState SolverState::zeros(int width, int height) {
  return {DisplacementField::zeros(width, height), GradientField::zeros(width, height),
          GradientField::zeros(width, height),     SymGradField::zeros(width, height),
          GradientField::zeros(width, height),     SymGradField::zeros(width, height),
          GradientField::zeros(width, height),     SymGradField::zeros(width, height)};
}

SolverState SolverState::warm(const DisplacementField& u0, const GradientField* a0) {
  auto st = zeros(u0.width(), u0.height());
  st.u = u0;
  if (a0 != nullptr) {
    if (a0->width() != u0.width() || a0->height() != u0.height())
      throw ValidationError("warm-start a has the wrong dimensions");
    st.a = *a0;
  }
  return st;
}

// ---------------------------------------------------------------------------
// TGV iteration

void pdhgmp_tgv_step_inplace(SolverState& st, const LinearizedData& L, const SolverParams& p) {
  require_shape(st.u, L);
  const int w = L.width();
  const int h = L.height();
  const double tau1 = p.tau1;
  const double tt = p.tau1 * p.tau2;
  const double theta = p.theta;
  const double s_thr = p.lambda1 / p.tau2;
  const double t_thr = p.lambda2 / p.tau2;
  const bool nonneg = p.constrain_positive_x;

  auto& u1 = st.u.u1;
  auto& u2 = st.u.u2;
  auto& a = st.a;
  const auto& bb1 = st.b1_bar;
  const auto& bb2 = st.b2_bar;

  // Primal updates: u by the per-pixel data prox, a by an explicit step.
  // Both read only the extrapolated duals, so they can be done in place.
  const double primal_max = row_max(h, [&](int y) {
    double m = 0.0;
    for (int x = 0; x < w; ++x) {
      const std::array<double, 2> xu{u1(x, y) - tt * fwd_adj(bb1[0], bb1[1], x, y),
                                     u2(x, y) - tt * fwd_adj(bb1[2], bb1[3], x, y)};
      const auto un = prox::generalized_shrink(tau1 * L.A(x, y), tau1 * L.B(x, y),
                                               tau1 * L.c(x, y), xu);
      u1(x, y) = un[0];
      u2(x, y) = un[1];

      const double adj0 = bwd_dx_adj(bb2[0], x, y) + 0.5 * bwd_dy_adj(bb2[1], x, y);
      const double adj1 = 0.5 * bwd_dx_adj(bb2[1], x, y) + bwd_dy_adj(bb2[2], x, y);
      const double adj2 = bwd_dx_adj(bb2[3], x, y) + 0.5 * bwd_dy_adj(bb2[4], x, y);
      const double adj3 = 0.5 * bwd_dx_adj(bb2[4], x, y) + bwd_dy_adj(bb2[5], x, y);
      a[0](x, y) -= tt * (adj0 - bb1[0](x, y));
      a[1](x, y) -= tt * (adj1 - bb1[1](x, y));
      a[2](x, y) -= tt * (adj2 - bb1[2](x, y));
      a[3](x, y) -= tt * (adj3 - bb1[3](x, y));

      for (double v : {un[0], un[1], a[0](x, y), a[1](x, y), a[2](x, y), a[3](x, y)})
        m = fold_abs(m, v);
    }
    return m;
  });
  check_bound(primal_max);

  // Split variables, dual ascent and extrapolation, fused per pixel. Reads
  // neighbouring values of the new u and a only.
  const double dual_max = row_max(h, [&](int y) {
    double m = 0.0;
    for (int x = 0; x < w; ++x) {
      const std::array<double, 4> g{fwd_dx(u1, x, y), fwd_dy(u1, x, y), fwd_dx(u2, x, y),
                                    fwd_dy(u2, x, y)};
      std::array<double, 4> xs{};
      for (std::size_t k = 0; k < 4; ++k) xs[k] = st.b1[k](x, y) + g[k] - a[k](x, y);
      const auto s = nonneg ? prox::coupled_shrink_nonneg_first(xs, s_thr)
                            : prox::coupled_shrink(xs, s_thr);
      for (std::size_t k = 0; k < 4; ++k) {
        const double b_old = st.b1[k](x, y);
        const double b_new = xs[k] - s[k];
        st.s[k](x, y) = s[k];
        st.b1[k](x, y) = b_new;
        st.b1_bar[k](x, y) = b_new + theta * (b_new - b_old);
        m = fold_abs(m, b_new);
      }

      const std::array<double, 6> sg{
          bwd_dx(a[0], x, y), 0.5 * (bwd_dy(a[0], x, y) + bwd_dx(a[1], x, y)),
          bwd_dy(a[1], x, y), bwd_dx(a[2], x, y),
          0.5 * (bwd_dy(a[2], x, y) + bwd_dx(a[3], x, y)), bwd_dy(a[3], x, y)};
      std::array<double, 6> xt{};
      for (std::size_t k = 0; k < 6; ++k) xt[k] = st.b2[k](x, y) + sg[k];
      const auto t = prox::coupled_shrink(xt, t_thr);
      for (std::size_t k = 0; k < 6; ++k) {
        const double b_old = st.b2[k](x, y);
        const double b_new = xt[k] - t[k];
        st.t[k](x, y) = t[k];
        st.b2[k](x, y) = b_new;
        st.b2_bar[k](x, y) = b_new + theta * (b_new - b_old);
        m = fold_abs(m, b_new);
      }
    }
    return m;
  });
  check_bound(dual_max);
}

SolverState pdhgmp_tgv_step(const SolverState& state, const LinearizedData& L,
                            const SolverParams& p) {
  SolverState next = state;
  pdhgmp_tgv_step_inplace(next, L, p);
  return next;
}

double energy_tgv(const DisplacementField& u, const GradientField& a, const LinearizedData& L,
                  const SolverParams& p) {
  require_shape(u, L);
  const int w = L.width();
  const auto& u1 = u.u1;
  const auto& u2 = u.u2;
  return row_sum(L.height(), [&](int y) {
    double acc = 0.0;
    for (int x = 0; x < w; ++x) {
      acc += std::abs(L.A(x, y) * u1(x, y) + L.B(x, y) * u2(x, y) + L.c(x, y));
      const double g0 = fwd_dx(u1, x, y) - a[0](x, y);
      const double g1 = fwd_dy(u1, x, y) - a[1](x, y);
      const double g2 = fwd_dx(u2, x, y) - a[2](x, y);
      const double g3 = fwd_dy(u2, x, y) - a[3](x, y);
      acc += p.lambda1 * std::sqrt(g0 * g0 + g1 * g1 + g2 * g2 + g3 * g3);
      double t2 = 0.0;
      for (int blk = 0; blk < 2; ++blk) {
        const auto& p0 = a[2 * blk];
        const auto& p1 = a[2 * blk + 1];
        const double t0 = bwd_dx(p0, x, y);
        const double t1 = 0.5 * (bwd_dy(p0, x, y) + bwd_dx(p1, x, y));
        const double t3 = bwd_dy(p1, x, y);
        t2 += t0 * t0 + t1 * t1 + t3 * t3;
      }
      acc += p.lambda2 * std::sqrt(t2);
    }
    return acc;
  });
}

namespace {

SolveResult solve_tgv(const LinearizedData& L, const DisplacementField& u0,
                      const GradientField* a0, const SolverParams& p) {
  auto st = SolverState::warm(u0, a0);
  SolveResult res;
  res.energy_trace.push_back(energy_tgv(st.u, st.a, L, p));
  for (int it = 1; it <= p.iterations; ++it) {
    pdhgmp_tgv_step_inplace(st, L, p);
    if (it % p.energy_every == 0 || it == p.iterations)
      res.energy_trace.push_back(energy_tgv(st.u, st.a, L, p));
  }
  res.u = std::move(st.u);
  res.a = std::move(st.a);
  res.s = std::move(st.s);
  return res;
}

// ---------------------------------------------------------------------------
// Comparison priors. Same primal-dual template as the TGV iteration:
//
//   min_x F(x) + sum_k G_k(y_k)   s.t.  K_k x = y_k
//
// with a gradient block (K1, 4-groups) and/or a second-difference block
// (K2, 6-groups). For IC the primal is (u, w) with v = u - w, so
// K1 = grad(u - w), K2 = grad2(w) and F contains lambda3 ||w||^2.

struct PriorLayout {
  bool grad_block = false;
  bool hess_block = false;
  bool quadratic_grad = false;  // H1: G1 = lambda ||y||^2
  bool split = false;           // IC
  double lambda_grad = 0.0;
  double lambda_hess = 0.0;
  double op_norm_sq = 0.0;  // upper bound on ||K||^2
};

// Bounds: ||grad||^2 <= 8, ||symgrad||^2 <= 6, hence ||grad2||^2 <= 48.
PriorLayout layout_for(const SolverParams& p) {
  PriorLayout l;
  switch (p.prior) {
    case Prior::H1:
      l.grad_block = l.quadratic_grad = true;
      l.lambda_grad = p.lambda1;
      l.op_norm_sq = 8.0;
      break;
    case Prior::TV:
      l.grad_block = true;
      l.lambda_grad = p.lambda1;
      l.op_norm_sq = 8.0;
      break;
    case Prior::TV2:
      l.hess_block = true;
      l.lambda_hess = p.lambda1;
      l.op_norm_sq = 48.0;
      break;
    case Prior::TVTV2:
      l.grad_block = l.hess_block = true;
      l.lambda_grad = p.lambda1;
      l.lambda_hess = p.lambda2;
      l.op_norm_sq = 56.0;
      break;
    case Prior::IC:
      l.grad_block = l.hess_block = l.split = true;
      l.lambda_grad = p.lambda1;
      l.lambda_hess = p.lambda2;
      l.op_norm_sq = 64.0;
      break;
    case Prior::TGV:
      throw ValidationError("tgv is not a comparison prior");
  }
  return l;
}

SymGradField grad2(const DisplacementField& u) { return sym_grad(grad(u)); }

DisplacementField grad2_adjoint(const SymGradField& t) { return grad_adjoint(sym_grad_adjoint(t)); }

DisplacementField difference(const DisplacementField& x, const DisplacementField& y) {
  auto d = x;
  for (std::size_t i = 0; i < d.u1.size(); ++i) {
    d.u1[i] -= y.u1[i];
    d.u2[i] -= y.u2[i];
  }
  return d;
}

template <std::size_t N>
void dual_update(PlaneStack<N>& b, PlaneStack<N>& b_bar, const PlaneStack<N>& kx, double lam,
                 double tau2, double theta, bool quadratic) {
  const int w = b.width();
  const double thr = lam / tau2;
  const double quad_scale = tau2 / (tau2 + 2.0 * lam);
  const double m = row_max(b.height(), [&](int y) {
    double mm = 0.0;
    for (int x = 0; x < w; ++x) {
      std::array<double, N> xs{};
      for (std::size_t k = 0; k < N; ++k) xs[k] = b[k](x, y) + kx[k](x, y);
      std::array<double, N> ys{};
      if (quadratic) {
        for (std::size_t k = 0; k < N; ++k) ys[k] = quad_scale * xs[k];
      } else {
        ys = prox::coupled_shrink(xs, thr);
      }
      for (std::size_t k = 0; k < N; ++k) {
        const double b_old = b[k](x, y);
        const double b_new = xs[k] - ys[k];
        b[k](x, y) = b_new;
        b_bar[k](x, y) = b_new + theta * (b_new - b_old);
        mm = fold_abs(mm, b_new);
      }
    }
    return mm;
  });
  check_bound(m);
}

SolveResult solve_comparison(const LinearizedData& L, const DisplacementField& u0,
                             const SolverParams& p) {
  const PriorLayout lay = layout_for(p);
  const int w = L.width();
  const int h = L.height();

  double tau1 = p.tau1;
  double tau2 = p.tau2;
  if (tau1 * tau2 * lay.op_norm_sq >= 1.0) {
    // Stay inside the stability region for the larger second-order operators.
    tau1 = tau2 = 0.99 / std::sqrt(lay.op_norm_sq);
  }
  const double tt = tau1 * tau2;
  const double w_scale = 1.0 / (1.0 + 2.0 * tau1 * p.lambda3);

  DisplacementField u = u0;
  auto wf = DisplacementField::zeros(w, h);
  auto b1 = GradientField::zeros(w, h);
  auto b1_bar = GradientField::zeros(w, h);
  auto b2 = SymGradField::zeros(w, h);
  auto b2_bar = SymGradField::zeros(w, h);

  SolveResult res;
  auto energy = [&] { return energy_prior(u, lay.split ? &wf : nullptr, L, p); };
  res.energy_trace.push_back(energy());

  for (int it = 1; it <= p.iterations; ++it) {
    auto ru = DisplacementField::zeros(w, h);
    auto rw = DisplacementField::zeros(w, h);
    if (lay.grad_block) {
      const auto q = grad_adjoint(b1_bar);
      ru = q;
      if (lay.split)
        for (std::size_t i = 0; i < q.u1.size(); ++i) {
          rw.u1[i] -= q.u1[i];
          rw.u2[i] -= q.u2[i];
        }
    }
    if (lay.hess_block) {
      const auto q = grad2_adjoint(b2_bar);
      auto& target = lay.split ? rw : ru;
      for (std::size_t i = 0; i < q.u1.size(); ++i) {
        target.u1[i] += q.u1[i];
        target.u2[i] += q.u2[i];
      }
    }

#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::array<double, 2> xu{u.u1(x, y) - tt * ru.u1(x, y),
                                       u.u2(x, y) - tt * ru.u2(x, y)};
        const auto un = prox::generalized_shrink(tau1 * L.A(x, y), tau1 * L.B(x, y),
                                                 tau1 * L.c(x, y), xu);
        u.u1(x, y) = un[0];
        u.u2(x, y) = un[1];
        if (lay.split) {
          wf.u1(x, y) = w_scale * (wf.u1(x, y) - tt * rw.u1(x, y));
          wf.u2(x, y) = w_scale * (wf.u2(x, y) - tt * rw.u2(x, y));
        }
      }
    }

    if (lay.grad_block) {
      const auto k1 = grad(lay.split ? difference(u, wf) : u);
      dual_update(b1, b1_bar, k1, lay.lambda_grad, tau2, p.theta, lay.quadratic_grad);
    }
    if (lay.hess_block) {
      const auto k2 = grad2(lay.split ? wf : u);
      dual_update(b2, b2_bar, k2, lay.lambda_hess, tau2, p.theta, false);
    }
    for (double v : u.u1.values()) check_bound(std::abs(v));
    for (double v : u.u2.values()) check_bound(std::abs(v));

    if (it % p.energy_every == 0 || it == p.iterations) res.energy_trace.push_back(energy());
  }

  if (lay.split) {
    res.a = grad(wf);
    res.s = grad(difference(u, wf));
  } else {
    res.a = GradientField::zeros(w, h);
    res.s = grad(u);
  }
  res.u = std::move(u);
  return res;
}

}  // namespace

double energy_prior(const DisplacementField& u, const DisplacementField* w,
                    const LinearizedData& L, const SolverParams& p) {
  require_shape(u, L);
  double e = data_energy(u, L);
  switch (p.prior) {
    case Prior::H1:
      return e + p.lambda1 * squared_norm(grad(u));
    case Prior::TV:
      return e + p.lambda1 * l21_norm(grad(u));
    case Prior::TV2:
      return e + p.lambda1 * l21_norm(grad2(u));
    case Prior::TVTV2:
      return e + p.lambda1 * l21_norm(grad(u)) + p.lambda2 * l21_norm(grad2(u));
    case Prior::IC: {
      const auto wz = w != nullptr ? *w : DisplacementField::zeros(u.width(), u.height());
      const auto v = difference(u, wz);
      double wsq = 0.0;
      for (std::size_t i = 0; i < wz.u1.size(); ++i)
        wsq += wz.u1[i] * wz.u1[i] + wz.u2[i] * wz.u2[i];
      return e + p.lambda1 * l21_norm(grad(v)) + p.lambda2 * l21_norm(grad2(wz)) +
             p.lambda3 * wsq;
    }
    case Prior::TGV:
      break;
  }
  throw ValidationError("energy_prior: use energy_tgv for the tgv prior");
}

SolveResult solve_linearized(const LinearizedData& L, const DisplacementField& u0,
                             const GradientField* a0, const SolverParams& p) {
  p.validate();
  require_shape(u0, L);
  if (p.prior == Prior::TGV) return solve_tgv(L, u0, a0, p);
  return solve_comparison(L, u0, p);
}

SolveResult solve_level(const ScalarField& f1, const ScalarField& f2,
                        const DisplacementField& ubar, const SolverParams& p,
                        const GradientField* a0) {
  p.validate();
  const auto L = linearize(f1, f2, ubar);
  return solve_linearized(L, ubar, a0, p);
}

SolveResult solve_prior(const ScalarField& f1, const ScalarField& f2,
                        const DisplacementField& ubar, const SolverParams& p) {
  return solve_level(f1, f2, ubar, p, nullptr);
}

StrainField strain_from_flow(const DisplacementField& u) {
  const auto g = grad(u);
  StrainField e{g[0], ScalarField(u.width(), u.height()), g[3]};
  for (std::size_t i = 0; i < e.eps12.size(); ++i) e.eps12[i] = 0.5 * (g[1][i] + g[2][i]);
  return e;
}

double split_residual(const DisplacementField& u, const GradientField& a, const GradientField& s) {
  const auto g = grad(u);
  double m = 0.0;
  for (std::size_t k = 0; k < 4; ++k)
    for (std::size_t i = 0; i < g[k].size(); ++i)
      m = std::max(m, std::abs(g[k][i] - a[k][i] - s[k][i]));
  return m;
}

}  // namespace tgvflow
