#include "tgvflow/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "tgvflow/errors.hpp"

namespace tgvflow {

namespace {

void require_min_dims(int w, int h) {
  if (w < 8 || h < 8) throw ValidationError("synthetic fields need dimensions >= 8");
}

double clamp_abs(double v, double bound) { return std::clamp(v, -bound, bound); }

// Uniform [0,1) from the raw engine output; independent of the standard
// library's distribution implementations.
double unit_double(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

}  // namespace

DisplacementField gen_piecewise_plus_linear(int width, int height, const SyntheticSpec& spec) {
  require_min_dims(width, height);
  auto u = DisplacementField::zeros(width, height);
  const int x0 = static_cast<int>(std::lround(spec.band_x0 * width));
  const int x1 = static_cast<int>(std::lround(spec.band_x1 * width));
  const double centre = 0.5 * width;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double jump = (x >= x0 && x < x1) ? spec.jump_amplitude : 0.0;
      u.u1(x, y) = clamp_abs(jump + spec.ramp_slope * (x - centre), spec.max_abs);
    }
  return u;
}

DisplacementField gen_half_jump_half_linear(int width, int height, const SyntheticSpec& spec) {
  require_min_dims(width, height);
  auto u = DisplacementField::zeros(width, height);
  const double lo = -0.5 * spec.jump_amplitude;
  const double hi = 0.5 * spec.jump_amplitude;
  const int xj = static_cast<int>(std::lround(spec.jump_x * width));
  const double rw = std::max(1.0, spec.ramp_width * width);
  const double start = xj - 0.5 * rw;
  for (int y = 0; y < height; ++y) {
    const bool upper = y < height / 2;
    for (int x = 0; x < width; ++x) {
      double v;
      if (upper) {
        const double t = std::clamp((x - start) / rw, 0.0, 1.0);
        v = lo + spec.jump_amplitude * t;
      } else {
        v = x < xj ? lo : hi;
      }
      u.u1(x, y) = clamp_abs(v, spec.max_abs);
    }
  }
  return u;
}

DisplacementField generate_flow(int width, int height, const SyntheticSpec& spec) {
  switch (spec.kind) {
    case SyntheticKind::PiecewisePlusLinear: return gen_piecewise_plus_linear(width, height, spec);
    case SyntheticKind::HalfJumpHalfLinear: return gen_half_jump_half_linear(width, height, spec);
  }
  throw ValidationError("unknown synthetic kind");
}

ScalarField value_noise_texture(int width, int height, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ScalarField out(width, height);
  double amplitude = 1.0;
  for (int cell : {16, 8, 4, 2}) {
    const int gw = width / cell + 2;
    const int gh = height / cell + 2;
    std::vector<double> lattice(static_cast<std::size_t>(gw) * gh);
    for (double& v : lattice) v = unit_double(rng);
    for (int y = 0; y < height; ++y) {
      const double fy = static_cast<double>(y) / cell;
      const int iy = static_cast<int>(fy);
      const double ty = smoothstep(fy - iy);
      for (int x = 0; x < width; ++x) {
        const double fx = static_cast<double>(x) / cell;
        const int ix = static_cast<int>(fx);
        const double tx = smoothstep(fx - ix);
        auto at = [&](int i, int j) { return lattice[static_cast<std::size_t>(j) * gw + i]; };
        const double top = at(ix, iy) + tx * (at(ix + 1, iy) - at(ix, iy));
        const double bot = at(ix, iy + 1) + tx * (at(ix + 1, iy + 1) - at(ix, iy + 1));
        out(x, y) += amplitude * (top + ty * (bot - top));
      }
    }
    amplitude *= 0.6;
  }
  // Sigmoid contrast stretch around the mean: full [0,1] range with
  // saturating tails instead of the narrow histogram summed octaves give.
  const auto vals = out.values();
  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= static_cast<double>(vals.size());
  double var = 0.0;
  for (double v : vals) var += (v - mean) * (v - mean);
  const double sigma = std::sqrt(var / static_cast<double>(vals.size()));
  for (double& v : out.values())
    v = sigma > 0.0 ? 0.5 + 0.5 * std::tanh((v - mean) / sigma) : 0.5;
  return out;
}

ImagePair warp_generate(const ScalarField& base, const DisplacementField& u_true) {
  if (!base.same_shape(u_true.u1) || !u_true.consistent())
    throw ValidationError("warp_generate: base and flow dimensions differ");
  ScalarField f1(base.width(), base.height());
  for (int y = 0; y < base.height(); ++y)
    for (int x = 0; x < base.width(); ++x)
      f1(x, y) = sample_bilinear(base, x + u_true.u1(x, y), y + u_true.u2(x, y));
  return {std::move(f1), base};
}

EndpointError endpoint_error(const DisplacementField& u, const DisplacementField& u_true) {
  if (!u.u1.same_shape(u_true.u1) || !u.consistent() || !u_true.consistent())
    throw ValidationError("endpoint_error: dimensions differ");
  EndpointError e;
  for (std::size_t i = 0; i < u.u1.size(); ++i) {
    const double d = std::hypot(u.u1[i] - u_true.u1[i], u.u2[i] - u_true.u2[i]);
    e.mean += d;
    e.max = std::max(e.max, d);
  }
  e.mean /= static_cast<double>(u.u1.size());
  return e;
}

double rms_difference(const ScalarField& a, const ScalarField& b) {
  if (!a.same_shape(b)) throw ValidationError("rms_difference: dimensions differ");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc / static_cast<double>(a.size()));
}

}  // namespace tgvflow
