#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "reference.hpp"
#include "tgvflow/diffops.hpp"
#include "tgvflow/errors.hpp"
#include "tgvflow/pyramid.hpp"
#include "tgvflow/solver.hpp"
#include "tgvflow/synth.hpp"

using namespace tgvflow;

namespace {

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

template <std::size_t N>
double max_diff(const PlaneStack<N>& a, const PlaneStack<N>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < N; ++k) m = std::max(m, testutil::max_abs_diff(a[k], b[k]));
  return m;
}

double state_diff(const SolverState& a, const SolverState& b) {
  return std::max({testutil::max_abs_diff(a.u.u1, b.u.u1), testutil::max_abs_diff(a.u.u2, b.u.u2),
                   max_diff(a.a, b.a), max_diff(a.s, b.s), max_diff(a.t, b.t),
                   max_diff(a.b1, b.b1), max_diff(a.b2, b.b2), max_diff(a.b1_bar, b.b1_bar),
                   max_diff(a.b2_bar, b.b2_bar)});
}

SolverState random_state(int w, int h, std::mt19937_64& rng) {
  return {testutil::random_flow(w, h, rng),       testutil::random_stack<4>(w, h, rng),
          testutil::random_stack<4>(w, h, rng),   testutil::random_stack<6>(w, h, rng),
          testutil::random_stack<4>(w, h, rng),   testutil::random_stack<6>(w, h, rng),
          testutil::random_stack<4>(w, h, rng),   testutil::random_stack<6>(w, h, rng)};
}

DisplacementField affine_flow(int w, int h, const double c[6]) {
  auto u = DisplacementField::zeros(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      u.u1(x, y) = c[0] + c[1] * x + c[2] * y;
      u.u2(x, y) = c[3] + c[4] * x + c[5] * y;
    }
  return u;
}

// Dense-SVD null space test of [[A B]; grad2].
bool existence_oracle(const LinearizedData& L) {
  const int w = L.width(), h = L.height();
  const Eigen::Index n = w * h;
  const auto D = reference::second_difference(w, h);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(7 * n, 2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    m(j, j) = L.A[static_cast<std::size_t>(j)];
    m(j, n + j) = L.B[static_cast<std::size_t>(j)];
  }
  for (const auto& e : D.entries) {
    m(n + e.row, e.col) = e.value;
    m(4 * n + e.row, n + e.col) = e.value;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  return sv(sv.size() - 1) > 1e-9 * sv(0);
}

}  // namespace

TEST_CASE("parameters") {
  SolverParams p;
  CHECK(p.lambda1 == 0.2);
  CHECK(p.lambda2 == 10.0);
  CHECK(p.lambda3 == 5e-5);
  CHECK(p.tau1 == 0.25);
  CHECK(p.tau2 == 0.25);
  CHECK(p.theta == 1.0);
  CHECK(p.iterations == 3000);
  CHECK_NOTHROW(p.validate());
  p.constrain_positive_x = true;
  CHECK_NOTHROW(p.validate());
  p.prior = Prior::TV;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  SolverParams q;
  q.lambda1 = -1.0;
  CHECK_THROWS_AS(q.validate(), ValidationError);
  CHECK(parse_prior("TVTV2") == Prior::TVTV2);
  CHECK(prior_name(Prior::IC) == "ic");
  CHECK_THROWS_AS(parse_prior("tv3"), ValidationError);
}

TEST_CASE("zero data is a fixed point") {
  LinearizedData L{ScalarField(5, 4), ScalarField(5, 4), ScalarField(5, 4)};
  const auto st = SolverState::zeros(5, 4);
  const auto next = pdhgmp_tgv_step(st, L, SolverParams{});
  CHECK(state_diff(st, next) == 0.0);
}

TEST_CASE("single step hand trace on 2x2") {
  LinearizedData L{ScalarField(2, 2, std::vector<double>{1, 0, 2, 0}),
                   ScalarField(2, 2, std::vector<double>{0, 1, 0, 0}),
                   ScalarField(2, 2, std::vector<double>{0.1, -0.3, 1.0, 0.4})};
  const auto next = pdhgmp_tgv_step(SolverState::zeros(2, 2), L, SolverParams{});
  // argmin |tau A y1 + tau B y2 + tau c| + |y|^2 / 2 from y = 0: the root of
  // the linear term if it lies within |tau (A, B)|, else a step of that length.
  CHECK(next.u.u1[0] == doctest::Approx(-0.1));
  CHECK(next.u.u2[0] == 0.0);
  CHECK(next.u.u2[1] == doctest::Approx(0.25));
  CHECK(next.u.u1[1] == 0.0);
  CHECK(next.u.u1[2] == doctest::Approx(-0.5));
  CHECK(next.u.u1[3] == 0.0);
  CHECK(next.u.u2[3] == 0.0);
}

TEST_CASE("extrapolated duals with theta = 1") {
  std::mt19937_64 rng(41);
  const auto L = testutil::random_data(6, 5, rng);
  const auto st = random_state(6, 5, rng);
  const auto next = pdhgmp_tgv_step(st, L, SolverParams{});
  for (std::size_t k = 0; k < 4; ++k)
    for (std::size_t i = 0; i < 30; ++i)
      CHECK(next.b1_bar[k][i] == doctest::Approx(2.0 * next.b1[k][i] - st.b1[k][i]));
  for (std::size_t k = 0; k < 6; ++k)
    for (std::size_t i = 0; i < 30; ++i)
      CHECK(next.b2_bar[k][i] == doctest::Approx(2.0 * next.b2[k][i] - st.b2[k][i]));
}

TEST_CASE("parallel step matches the serial reference") {
  std::mt19937_64 rng(42);
  for (bool constrain : {false, true}) {
    for (auto [w, h] : {std::pair{1, 1}, {3, 2}, {9, 7}, {16, 11}}) {
      SolverParams p;
      p.lambda1 = 0.3;
      p.lambda2 = 0.7;
      p.constrain_positive_x = constrain;
      const auto L = testutil::random_data(w, h, rng);
      auto fast = random_state(w, h, rng);
      auto ref = fast;
      for (int it = 0; it < 25; ++it) {
        pdhgmp_tgv_step_inplace(fast, L, p);
        reference::tgv_step(ref, L, p);
      }
      CHECK(state_diff(fast, ref) <= 1e-11);
    }
  }
}

TEST_CASE("value and in-place steps agree") {
  std::mt19937_64 rng(43);
  const auto L = testutil::random_data(8, 6, rng);
  auto st = random_state(8, 6, rng);
  const auto next = pdhgmp_tgv_step(st, L, SolverParams{});
  pdhgmp_tgv_step_inplace(st, L, SolverParams{});
  CHECK(state_diff(st, next) == 0.0);
}

TEST_CASE("step sizes satisfy tau1 tau2 ||K||^2 < 1") {
  // Power iteration on K^T K with K(u, a) = (grad u - a, symgrad a).
  std::mt19937_64 rng(44);
  const int w = 24, h = 20;
  auto u = testutil::random_flow(w, h, rng);
  auto a = testutil::random_stack<4>(w, h, rng);
  double lambda = 0.0;
  for (int it = 0; it < 300; ++it) {
    auto p = grad(u);
    for (std::size_t k = 0; k < 4; ++k)
      for (std::size_t i = 0; i < p[k].size(); ++i) p[k][i] -= a[k][i];
    const auto q = sym_grad(a);
    auto nu = grad_adjoint(p);
    auto na = sym_grad_adjoint(q);
    for (std::size_t k = 0; k < 4; ++k)
      for (std::size_t i = 0; i < na[k].size(); ++i) na[k][i] -= p[k][i];
    const double norm = std::sqrt(testutil::dot(nu.u1, nu.u1) + testutil::dot(nu.u2, nu.u2) +
                                  testutil::dot(na, na));
    lambda = norm / std::sqrt(testutil::dot(u.u1, u.u1) + testutil::dot(u.u2, u.u2) +
                              testutil::dot(a, a));
    for (auto* f : {&nu.u1, &nu.u2})
      for (double& v : f->values()) v /= norm;
    for (auto& pl : na.planes)
      for (double& v : pl.values()) v /= norm;
    u = nu;
    a = na;
  }
  const SolverParams p;
  CHECK(lambda > 4.0);
  CHECK(p.tau1 * p.tau2 * lambda < 1.0);
}

TEST_CASE("energy_tgv") {
  std::mt19937_64 rng(45);
  const auto L = testutil::random_data(4, 4, rng);
  double sum_c = 0.0;
  for (double v : L.c.values()) sum_c += std::abs(v);
  CHECK(energy_tgv(DisplacementField::zeros(4, 4), GradientField::zeros(4, 4), L, SolverParams{}) ==
        doctest::Approx(sum_c));

  // Dyadic coefficients, so every difference is exact.
  const double c[6] = {0.25, -0.125, 0.5, 1.0, 0.0625, -0.375};
  const auto ua = affine_flow(7, 6, c);
  LinearizedData Z{ScalarField(7, 6), ScalarField(7, 6), ScalarField(7, 6)};
  CHECK(energy_tgv(ua, grad(ua), Z, SolverParams{}) == 0.0);

  // Term-by-term oracle.
  SolverParams p;
  p.lambda1 = 0.7;
  p.lambda2 = 1.3;
  const auto u = testutil::random_flow(4, 4, rng);
  const auto a = testutil::random_stack<4>(4, 4, rng);
  const auto gu = grad(u);
  const auto sa = sym_grad(a);
  double oracle = 0.0;
  for (std::size_t i = 0; i < 16; ++i) {
    oracle += std::abs(L.A[i] * u.u1[i] + L.B[i] * u.u2[i] + L.c[i]);
    double s2 = 0.0, t2 = 0.0;
    for (std::size_t k = 0; k < 4; ++k) s2 += (gu[k][i] - a[k][i]) * (gu[k][i] - a[k][i]);
    for (std::size_t k = 0; k < 6; ++k) t2 += sa[k][i] * sa[k][i];
    oracle += p.lambda1 * std::sqrt(s2) + p.lambda2 * std::sqrt(t2);
  }
  CHECK(energy_tgv(u, a, L, p) == doctest::Approx(oracle));
}

TEST_CASE("energy decreases over a long run") {
  std::mt19937_64 rng(46);
  const auto L = testutil::random_data(8, 8, rng);
  SolverParams p;
  p.energy_every = 10;
  const auto r = solve_linearized(L, DisplacementField::zeros(8, 8), nullptr, p);
  REQUIRE(r.energy_trace.size() == 301);
  CHECK(r.energy_trace.back() <= r.energy_trace[1]);
  CHECK(r.energy_trace.back() <= r.energy_trace.front());
}

TEST_CASE("solve_level") {
  const auto tex = value_noise_texture(32, 32, 5);
  SolverParams p;
  p.iterations = 400;
  const auto same = solve_level(tex, tex, DisplacementField::zeros(32, 32), p);
  CHECK(max_abs(same.u.u1) <= 1e-6);
  CHECK(max_abs(same.u.u2) <= 1e-6);

  // 1-px shift: f1(x) = f2(x + 1).
  DisplacementField shift{ScalarField(32, 32, 1.0), ScalarField(32, 32, 0.0)};
  const auto pair = warp_generate(tex, shift);
  p.iterations = 600;
  auto r = solve_level(pair.f1, pair.f2, DisplacementField::zeros(32, 32), p);
  r = solve_level(pair.f1, pair.f2, r.u, p, &r.a);
  double mean = 0.0;
  for (double v : r.u.u1.values()) mean += v;
  mean /= 1024.0;
  CHECK(mean == doctest::Approx(1.0).epsilon(0.1));

  p.constrain_positive_x = true;
  const auto c = solve_level(pair.f1, pair.f2, DisplacementField::zeros(32, 32), p);
  const auto g = grad(c.u);
  double worst = 0.0;
  for (std::size_t i = 0; i < c.s[0].size(); ++i) {
    CHECK(c.s[0][i] >= 0.0);
    worst = std::min(worst, g[0][i] - c.a[0][i]);
  }
  CHECK(worst >= -1e-3);
}

TEST_CASE("comparison priors leave identical images at rest") {
  const auto tex = value_noise_texture(24, 24, 3);
  for (Prior pr : {Prior::H1, Prior::TV, Prior::TV2, Prior::TVTV2, Prior::IC, Prior::TGV}) {
    SolverParams p;
    p.prior = pr;
    p.iterations = 200;
    const auto r = solve_prior(tex, tex, DisplacementField::zeros(24, 24), p);
    CHECK(max_abs(r.u.u1) <= 1e-6);
    CHECK(max_abs(r.u.u2) <= 1e-6);
  }
}

TEST_CASE("comparison priors decrease their energy") {
  std::mt19937_64 rng(47);
  const auto L = testutil::random_data(10, 9, rng);
  for (Prior pr : {Prior::H1, Prior::TV, Prior::TV2, Prior::TVTV2, Prior::IC}) {
    SolverParams p;
    p.prior = pr;
    p.lambda1 = 0.2;
    p.lambda2 = 0.3;
    p.lambda3 = 0.01;
    p.iterations = 1500;
    const auto r = solve_linearized(L, DisplacementField::zeros(10, 9), nullptr, p);
    CHECK(r.energy_trace.back() <= r.energy_trace.front());
    CHECK(r.energy_trace.back() <= r.energy_trace[r.energy_trace.size() / 2] + 1e-6);
  }
  SolverParams tgv;
  CHECK_THROWS_AS(energy_prior(DisplacementField::zeros(10, 9), nullptr, L, tgv), ValidationError);
}

TEST_CASE("TV staircases along the ramp of the piecewise synthetic") {
  const auto base = value_noise_texture(100, 100, 7);
  const auto truth = generate_flow(100, 100, SyntheticSpec::piecewise_default());
  const auto pair = warp_generate(base, truth);
  SolverParams p = SolverParams{};
  p.prior = Prior::TV;
  p.lambda1 = 0.1;
  p.iterations = 300;
  const auto r = coarse_to_fine_solve(pair.f1, pair.f2, p, PyramidParams{});
  std::vector<long> bins;
  for (int x = 0; x < 100; ++x) bins.push_back(std::lround(r.u.u1(x, 50) / 0.05));
  std::sort(bins.begin(), bins.end());
  const auto distinct = std::unique(bins.begin(), bins.end()) - bins.begin();
  CHECK(distinct >= 3);
}

TEST_CASE("divergence is reported") {
  std::mt19937_64 rng(48);
  auto L = testutil::random_data(12, 12, rng);
  L.c(5, 7) = std::numeric_limits<double>::quiet_NaN();
  SolverParams p;
  p.iterations = 50;
  CHECK_THROWS_AS(solve_linearized(L, DisplacementField::zeros(12, 12), nullptr, p), DivergenceError);
}

TEST_CASE("strain_from_flow") {
  const auto z = strain_from_flow(DisplacementField::zeros(5, 5));
  CHECK(max_abs(z.eps11) == 0.0);

  const double stretch[6] = {0, 0.1, 0, 0, 0, 0};
  const auto e = strain_from_flow(affine_flow(6, 6, stretch));
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 5; ++x) {
      CHECK(e.eps11(x, y) == doctest::Approx(0.1));
      CHECK(e.eps12(x, y) == 0.0);
      CHECK(e.eps22(x, y) == 0.0);
    }
  const double rot[6] = {0, 0, 0.1, 0, -0.1, 0};
  const auto r = strain_from_flow(affine_flow(6, 6, rot));
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 5; ++x) CHECK(r.eps12(x, y) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("split_residual") {
  std::mt19937_64 rng(49);
  const auto u = testutil::random_flow(5, 4, rng);
  const auto a = testutil::random_stack<4>(5, 4, rng);
  auto s = grad(u);
  for (std::size_t k = 0; k < 4; ++k)
    for (std::size_t i = 0; i < 20; ++i) s[k][i] -= a[k][i];
  CHECK(split_residual(u, a, s) <= 1e-15);
  s[2][7] += 0.5;
  CHECK(split_residual(u, a, s) == doctest::Approx(0.5));
}

TEST_CASE("existence_check") {
  LinearizedData Z{ScalarField(4, 4), ScalarField(4, 4), ScalarField(4, 4)};
  CHECK_FALSE(existence_check(Z));
  CHECK_FALSE(existence_oracle(Z));

  // A = 1, B = 0 leaves u = (0, const) in both kernels.
  LinearizedData ax{ScalarField(4, 4, 1.0), ScalarField(4, 4), ScalarField(4, 4)};
  CHECK_FALSE(existence_oracle(ax));
  CHECK(existence_check(ax) == existence_oracle(ax));

  std::mt19937_64 rng(50);
  for (int trial = 0; trial < 20; ++trial) {
    const auto L = testutil::random_data(4, 4, rng);
    CHECK(existence_check(L) == existence_oracle(L));
  }
  CHECK_THROWS_AS(existence_check(LinearizedData{ScalarField(20, 4), ScalarField(20, 4),
                                                 ScalarField(20, 4)}),
                  ValidationError);
}
