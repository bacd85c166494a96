#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "tgvflow/dataterm.hpp"
#include "tgvflow/diffops.hpp"
#include "tgvflow/errors.hpp"
#include "tgvflow/synth.hpp"

using namespace tgvflow;

namespace {

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST_CASE("piecewise plus linear") {
  SyntheticSpec s;
  s.jump_amplitude = 0.0;
  s.ramp_slope = 0.0;
  const auto z = gen_piecewise_plus_linear(20, 10, s);
  CHECK(max_abs(z.u1) == 0.0);
  CHECK(max_abs(z.u2) == 0.0);

  s.jump_amplitude = 1.0;
  s.band_x0 = 0.0;
  s.band_x1 = 0.5;
  const auto u = gen_piecewise_plus_linear(20, 10, s);
  const auto g = grad_forward(u.u1);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 20; ++x) {
      CHECK((u.u1(x, y) == 0.0 || u.u1(x, y) == 1.0));
      CHECK(std::abs(g.gx(x, y)) == (x == 9 ? 1.0 : 0.0));
    }

  const auto d = generate_flow(100, 100, SyntheticSpec::piecewise_default());
  CHECK(max_abs(d.u1) <= 2.0);
  CHECK(max_abs(d.u2) == 0.0);
  CHECK_THROWS_AS(gen_piecewise_plus_linear(4, 20, s), ValidationError);
}

TEST_CASE("half jump half linear") {
  auto s = SyntheticSpec::half_jump_default();
  s.jump_amplitude = 0.0;
  CHECK(max_abs(gen_half_jump_half_linear(40, 20, s).u1) == 0.0);

  s = SyntheticSpec::half_jump_default();
  const int w = 40, h = 20;
  const auto u = gen_half_jump_half_linear(w, h, s);
  const auto g = grad_forward(u.u1);
  const int xj = 20;
  // Lower half: single spike of the full amplitude.
  for (int x = 0; x < w; ++x) CHECK(g.gx(x, 15) == (x == xj - 1 ? 2.0 : 0.0));
  // Upper half: constant slope amplitude / ramp width inside the transition.
  const double rw = s.ramp_width * w;
  for (int x = xj - 8; x < xj + 8; ++x) CHECK(g.gx(x, 3) == doctest::Approx(2.0 / rw));
  // Both halves share their plateaus.
  CHECK(u.u1(0, 0) == u.u1(0, h - 1));
  CHECK(u.u1(w - 1, 0) == u.u1(w - 1, h - 1));
  CHECK(max_abs(u.u1) <= 2.0);
}

TEST_CASE("value_noise_texture") {
  const auto a = value_noise_texture(50, 40, 7);
  CHECK(a == value_noise_texture(50, 40, 7));
  CHECK_FALSE(a == value_noise_texture(50, 40, 8));
  for (double v : a.values()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("warp_generate") {
  const auto base = value_noise_texture(30, 30, 1);
  const auto z = warp_generate(base, DisplacementField::zeros(30, 30));
  CHECK(z.f1 == z.f2);
  CHECK(z.f2 == base);

  ScalarField ramp(10, 6);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 10; ++x) ramp(x, y) = 0.1 * x;
  DisplacementField one{ScalarField(10, 6, 1.0), ScalarField(10, 6)};
  const auto p = warp_generate(ramp, one);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 9; ++x) CHECK(p.f1(x, y) == ramp(x + 1, y));

  const auto u = generate_flow(30, 30, SyntheticSpec::half_jump_default());
  const auto q = warp_generate(base, u);
  CHECK(data_energy(u, linearize(q.f1, q.f2, u)) <= 1e-9 * 900);
  CHECK_THROWS_AS(warp_generate(base, DisplacementField::zeros(29, 30)), ValidationError);
}

TEST_CASE("endpoint_error") {
  std::mt19937_64 rng(6);
  const auto u = testutil::random_flow(9, 7, rng);
  const auto e0 = endpoint_error(u, u);
  CHECK(e0.mean == 0.0);
  CHECK(e0.max == 0.0);

  auto v = u;
  for (double& x : v.u1.values()) x += 0.3;
  for (double& x : v.u2.values()) x += 0.4;
  const auto e1 = endpoint_error(v, u);
  CHECK(e1.mean == doctest::Approx(0.5));
  CHECK(e1.max == doctest::Approx(0.5));

  const auto w = testutil::random_flow(9, 7, rng);
  double mean = 0.0, mx = 0.0;
  for (std::size_t i = 0; i < 63; ++i) {
    const double d = std::hypot(w.u1[i] - u.u1[i], w.u2[i] - u.u2[i]);
    mean += d;
    mx = std::max(mx, d);
  }
  const auto e2 = endpoint_error(w, u);
  CHECK(e2.mean == doctest::Approx(mean / 63.0));
  CHECK(e2.max == mx);
  CHECK(rms_difference(u.u1, u.u1) == 0.0);
}
