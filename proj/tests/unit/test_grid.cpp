#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "tgvflow/errors.hpp"
#include "tgvflow/grid.hpp"

using namespace tgvflow;

TEST_CASE("scalar field construction") {
  ScalarField f(3, 2, 1.5);
  CHECK(f.size() == 6);
  CHECK(f(2, 1) == 1.5);
  f(1, 1) = 4.0;
  CHECK(f[4] == 4.0);
  CHECK_THROWS_AS(ScalarField(0, 3), ValidationError);
  CHECK_THROWS_AS(ScalarField(2, 2, std::vector<double>(3)), ValidationError);
  CHECK(GradientField::zeros(4, 3).consistent());
}

TEST_CASE("mirror_index") {
  CHECK(mirror_index(3, 10) == 3);
  CHECK(mirror_index(-1, 10) == 1);
  CHECK(mirror_index(10, 10) == 8);
  CHECK(mirror_index(-20, 10) == 2);
  CHECK(mirror_index(5, 1) == 0);
  for (int i = -40; i < 40; ++i) {
    const int m = mirror_index(i, 7);
    CHECK(m >= 0);
    CHECK(m < 7);
  }
}

TEST_CASE("sample_bilinear") {
  ScalarField f(4, 4);
  f(1, 1) = 5.0;
  CHECK(sample_bilinear(f, 1.0, 1.0) == 5.0);

  ScalarField c(10, 10, 3.0);
  CHECK(sample_bilinear(c, 0.37, 7.21) == 3.0);

  ScalarField ramp(5, 5);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 5; ++x) ramp(x, y) = x;
  CHECK(sample_bilinear(ramp, 1.5, 2.0) == doctest::Approx(1.5).epsilon(1e-15));
  const double blend = 0.25 * (ramp(1, 2) + ramp(2, 2) + ramp(1, 3) + ramp(2, 3));
  CHECK(sample_bilinear(ramp, 1.5, 2.5) == doctest::Approx(blend));

  CHECK_THROWS_AS(sample_bilinear(f, NAN, 0.0), ValidationError);
  CHECK_THROWS_AS(sample_bilinear(f, 0.0, INFINITY), ValidationError);
}

TEST_CASE("median_filter") {
  ScalarField c(6, 5, 2.5);
  CHECK(median_filter(c, 2) == c);

  ScalarField spike(9, 9);
  spike(4, 4) = 100.0;
  const auto m = median_filter(spike, 1);
  for (double v : m.values()) CHECK(v == 0.0);

  ScalarField step(10, 6);
  for (int y = 0; y < 6; ++y)
    for (int x = 5; x < 10; ++x) step(x, y) = 1.0;
  CHECK(median_filter(step, 1) == step);
  CHECK(median_filter(step, 2) == step);

  // Sorting oracle on random data.
  std::mt19937_64 rng(3);
  const auto r = testutil::random_field(7, 6, rng);
  const auto mr = median_filter(r, 1);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 7; ++x) {
      std::vector<double> win;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) win.push_back(r(mirror_index(x + dx, 7), mirror_index(y + dy, 6)));
      std::sort(win.begin(), win.end());
      CHECK(mr(x, y) == win[4]);
    }
  CHECK_THROWS_AS(median_filter(r, 0), ValidationError);
}

TEST_CASE("downsample") {
  ScalarField c(20, 12, 0.7);
  const auto d = downsample(c, 0.5);
  CHECK(d.width() == 10);
  CHECK(d.height() == 6);
  for (double v : d.values()) CHECK(v == 0.7);

  const auto d8 = downsample(ScalarField(8, 8), 0.5);
  CHECK(d8.width() == 4);
  CHECK(d8.height() == 4);
  CHECK(downsample(ScalarField(101, 9), 0.5).width() == 51);

  // A ramp survives prefilter and resampling wherever neither touches the
  // mirrored border: value at x' is the source coordinate (x'+0.5)/f - 0.5.
  const int w = 32;
  ScalarField ramp(w, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < w; ++x) ramp(x, y) = 0.25 * x;
  const auto dr = downsample(ramp, 0.5);
  for (int x = 0; x < dr.width(); ++x) {
    const double src = (x + 0.5) * 2.0 - 0.5;
    if (src - 1.0 < 2.0 || src + 1.0 > w - 3) continue;
    CHECK(dr(x, 3) == doctest::Approx(0.25 * src).epsilon(1e-12));
  }
  CHECK_THROWS_AS(downsample(ramp, 1.0), ValidationError);
  CHECK_THROWS_AS(downsample(ramp, 0.0), ValidationError);
}

TEST_CASE("binomial_smooth keeps constants and interior ramps") {
  ScalarField c(9, 7, -1.25);
  CHECK(binomial_smooth(c) == c);
  ScalarField ramp(12, 12);
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 12; ++x) ramp(x, y) = 2.0 * x - y;
  const auto s = binomial_smooth(ramp);
  for (int y = 2; y < 10; ++y)
    for (int x = 2; x < 10; ++x) CHECK(s(x, y) == doctest::Approx(ramp(x, y)));
}

TEST_CASE("upsample_flow") {
  const auto z = upsample_flow(DisplacementField::zeros(5, 4), 13, 9, 2.0);
  CHECK(z.width() == 13);
  for (double v : z.u1.values()) CHECK(v == 0.0);

  DisplacementField c{ScalarField(6, 6, 1.0), ScalarField(6, 6, 0.0)};
  const auto c2 = upsample_flow(c, 12, 12, 2.0);
  for (double v : c2.u1.values()) CHECK(v == 2.0);
  for (double v : c2.u2.values()) CHECK(v == 0.0);

  // Linear plane at half resolution; doubled grid and values.
  const int n = 16;
  auto lin = DisplacementField::zeros(n, n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) lin.u1(x, y) = 0.1 * x + 0.05 * y;
  const auto up = upsample_flow(lin, 2 * n, 2 * n, 2.0);
  for (int y = 2; y < 2 * n - 2; ++y)
    for (int x = 2; x < 2 * n - 2; ++x) {
      const double sx = (x + 0.5) / 2.0 - 0.5, sy = (y + 0.5) / 2.0 - 0.5;
      CHECK(up.u1(x, y) == doctest::Approx(2.0 * (0.1 * sx + 0.05 * sy)).epsilon(1e-6));
    }
  CHECK_THROWS_AS(upsample_flow(lin, 8, 8, 2.0), ValidationError);
}

TEST_CASE("all_finite") {
  ScalarField f(3, 3);
  CHECK(all_finite(f));
  f(1, 2) = NAN;
  CHECK_FALSE(all_finite(f));
}
