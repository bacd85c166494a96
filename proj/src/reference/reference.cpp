#include "reference.hpp"

#include <cmath>

#include "tgvflow/errors.hpp"
#include "tgvflow/prox.hpp"

namespace tgvflow::reference {

std::vector<double> SparseOp::apply(const std::vector<double>& x) const {
  std::vector<double> y(static_cast<std::size_t>(rows), 0.0);
  for (const auto& e : entries) y[static_cast<std::size_t>(e.row)] += e.value * x[static_cast<std::size_t>(e.col)];
  return y;
}

std::vector<double> SparseOp::apply_transpose(const std::vector<double>& y) const {
  std::vector<double> x(static_cast<std::size_t>(cols), 0.0);
  for (const auto& e : entries) x[static_cast<std::size_t>(e.col)] += e.value * y[static_cast<std::size_t>(e.row)];
  return x;
}

namespace {

int idx(int x, int y, int w) { return y * w + x; }

// 1D backward difference at i is active only if i-1 and i+1 are in range.
bool both_neighbours(int i, int n) { return i - 1 >= 0 && i + 1 < n; }

}  // namespace

SparseOp forward_gradient(int w, int h) {
  const int n = w * h;
  SparseOp op{2 * n, n, {}};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int i = idx(x, y, w);
      if (x + 1 < w) {
        op.entries.push_back({i, idx(x + 1, y, w), 1.0});
        op.entries.push_back({i, i, -1.0});
      }
      if (y + 1 < h) {
        op.entries.push_back({n + i, idx(x, y + 1, w), 1.0});
        op.entries.push_back({n + i, i, -1.0});
      }
    }
  return op;
}

SparseOp symmetrized_backward(int w, int h) {
  const int n = w * h;
  SparseOp op{3 * n, 2 * n, {}};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int i = idx(x, y, w);
      if (both_neighbours(x, w)) {
        const int l = idx(x - 1, y, w);
        op.entries.push_back({i, i, 1.0});  // dx~ a1
        op.entries.push_back({i, l, -1.0});
        op.entries.push_back({n + i, n + i, 0.5});  // dx~ a2 / 2
        op.entries.push_back({n + i, n + l, -0.5});
      }
      if (both_neighbours(y, h)) {
        const int u = idx(x, y - 1, w);
        op.entries.push_back({n + i, i, 0.5});  // dy~ a1 / 2
        op.entries.push_back({n + i, u, -0.5});
        op.entries.push_back({2 * n + i, n + i, 1.0});  // dy~ a2
        op.entries.push_back({2 * n + i, n + u, -1.0});
      }
    }
  return op;
}

SparseOp second_difference(int w, int h) {
  const auto g = forward_gradient(w, h);
  const auto s = symmetrized_backward(w, h);
  const int n = w * h;
  // Dense product is fine at test sizes.
  SparseOp op{3 * n, n, {}};
  std::vector<double> col(static_cast<std::size_t>(n), 0.0);
  for (int c = 0; c < n; ++c) {
    col[static_cast<std::size_t>(c)] = 1.0;
    const auto out = s.apply(g.apply(col));
    for (int r = 0; r < 3 * n; ++r)
      if (out[static_cast<std::size_t>(r)] != 0.0) op.entries.push_back({r, c, out[static_cast<std::size_t>(r)]});
    col[static_cast<std::size_t>(c)] = 0.0;
  }
  return op;
}

std::vector<double> flatten(const ScalarField& f) {
  return {f.values().begin(), f.values().end()};
}

namespace {

template <std::size_t N>
void unflatten(const std::vector<double>& v, std::size_t offset, PlaneStack<N>& s) {
  for (std::size_t k = 0; k < N; ++k)
    for (std::size_t i = 0; i < s[k].size(); ++i) s[k][i] = v[offset + k * s[k].size() + i];
}

}  // namespace

void tgv_step(SolverState& st, const LinearizedData& L, const SolverParams& p) {
  const int w = L.width();
  const int h = L.height();
  const std::size_t n = static_cast<std::size_t>(w) * h;
  const auto G = forward_gradient(w, h);
  const auto S = symmetrized_backward(w, h);
  const double tt = p.tau1 * p.tau2;

  auto b1bar = flatten(st.b1_bar);
  auto b2bar = flatten(st.b2_bar);
  auto split = [](const std::vector<double>& v, std::size_t block, std::size_t len) {
    return std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(block * len),
                               v.begin() + static_cast<std::ptrdiff_t>((block + 1) * len));
  };

  // (1) u
  for (int comp = 0; comp < 2; ++comp) {
    const auto gt = G.apply_transpose(split(b1bar, static_cast<std::size_t>(comp), 2 * n));
    auto& plane = comp == 0 ? st.u.u1 : st.u.u2;
    for (std::size_t i = 0; i < n; ++i) plane[i] -= tt * gt[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto y = prox::generalized_shrink(p.tau1 * L.A[i], p.tau1 * L.B[i], p.tau1 * L.c[i],
                                            {st.u.u1[i], st.u.u2[i]});
    st.u.u1[i] = y[0];
    st.u.u2[i] = y[1];
  }

  // (2) a
  auto a = flatten(st.a);
  for (std::size_t blk = 0; blk < 2; ++blk) {
    const auto st_adj = S.apply_transpose(split(b2bar, blk, 3 * n));
    for (std::size_t i = 0; i < 2 * n; ++i) {
      const std::size_t k = blk * 2 * n + i;
      a[k] -= tt * (st_adj[i] - b1bar[k]);
    }
  }
  unflatten(a, 0, st.a);

  // grad u and symgrad a at the new iterate
  std::vector<double> gu;
  for (const auto* plane : {&st.u.u1, &st.u.u2}) {
    const auto g = G.apply(flatten(*plane));
    gu.insert(gu.end(), g.begin(), g.end());
  }
  std::vector<double> sa;
  for (std::size_t blk = 0; blk < 2; ++blk) {
    const auto t = S.apply(split(a, blk, 2 * n));
    sa.insert(sa.end(), t.begin(), t.end());
  }

  // (3) s, (4) t
  auto b1 = flatten(st.b1);
  auto b2 = flatten(st.b2);
  std::vector<double> s(4 * n);
  std::vector<double> t(6 * n);
  for (std::size_t i = 0; i < n; ++i) {
    std::array<double, 4> xs{};
    for (std::size_t k = 0; k < 4; ++k) xs[k] = b1[k * n + i] + gu[k * n + i] - a[k * n + i];
    const auto ys = p.constrain_positive_x ? prox::coupled_shrink_nonneg_first(xs, p.lambda1 / p.tau2)
                                           : prox::coupled_shrink(xs, p.lambda1 / p.tau2);
    for (std::size_t k = 0; k < 4; ++k) s[k * n + i] = ys[k];
    std::array<double, 6> xt{};
    for (std::size_t k = 0; k < 6; ++k) xt[k] = b2[k * n + i] + sa[k * n + i];
    const auto yt = prox::coupled_shrink(xt, p.lambda2 / p.tau2);
    for (std::size_t k = 0; k < 6; ++k) t[k * n + i] = yt[k];
  }

  // (5)-(8) duals and extrapolation
  for (std::size_t k = 0; k < 4 * n; ++k) {
    const double old = b1[k];
    b1[k] = old + gu[k] - a[k] - s[k];
    b1bar[k] = b1[k] + p.theta * (b1[k] - old);
  }
  for (std::size_t k = 0; k < 6 * n; ++k) {
    const double old = b2[k];
    b2[k] = old + sa[k] - t[k];
    b2bar[k] = b2[k] + p.theta * (b2[k] - old);
  }
  unflatten(s, 0, st.s);
  unflatten(t, 0, st.t);
  unflatten(b1, 0, st.b1);
  unflatten(b2, 0, st.b2);
  unflatten(b1bar, 0, st.b1_bar);
  unflatten(b2bar, 0, st.b2_bar);

  for (double v : b1) if (!std::isfinite(v)) throw DivergenceError("divergence detected");
}

}  // namespace tgvflow::reference
