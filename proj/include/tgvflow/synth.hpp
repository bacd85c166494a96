#pragma once

#include <cstdint>

#include "tgvflow/grid.hpp"

namespace tgvflow {

enum class SyntheticKind {
  /// u1 = jump inside a vertical band + global linear ramp in x.
  PiecewisePlusLinear,
  /// Upper half: linear transition between two plateaus; lower half: a step
  /// between the same plateaus at the same column.
  HalfJumpHalfLinear,
};

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::PiecewisePlusLinear;
  double jump_amplitude = 1.0;  // px
  double ramp_slope = 0.01;     // px per px, PiecewisePlusLinear only
  double band_x0 = 1.0 / 3.0;   // band [x0, x1) as fractions of the width
  double band_x1 = 2.0 / 3.0;
  double jump_x = 0.5;          // HalfJumpHalfLinear: step column, fraction of width
  double ramp_width = 0.5;      // HalfJumpHalfLinear: transition width, fraction of width
  double max_abs = 2.0;         // generated values are clamped to [-max_abs, max_abs]

  static SyntheticSpec piecewise_default() { return {}; }
  static SyntheticSpec half_jump_default() {
    SyntheticSpec s;
    s.kind = SyntheticKind::HalfJumpHalfLinear;
    s.jump_amplitude = 2.0;
    return s;
  }
};

DisplacementField gen_piecewise_plus_linear(int width, int height, const SyntheticSpec& spec);
DisplacementField gen_half_jump_half_linear(int width, int height, const SyntheticSpec& spec);
/// Dispatches on spec.kind.
DisplacementField generate_flow(int width, int height, const SyntheticSpec& spec);

/// Deterministic multi-octave value-noise texture normalized to [0, 1].
ScalarField value_noise_texture(int width, int height, std::uint64_t seed);

struct ImagePair {
  ScalarField f1;
  ScalarField f2;
};

/// f2 = base, f1(j) = base(j + u_true(j)), so that u_true satisfies
/// f1(x) = f2(x + u(x)) exactly under bilinear sampling.
ImagePair warp_generate(const ScalarField& base, const DisplacementField& u_true);

struct EndpointError {
  double mean = 0.0;
  double max = 0.0;
};

EndpointError endpoint_error(const DisplacementField& u, const DisplacementField& u_true);

/// Root mean square of a - b over all pixels.
double rms_difference(const ScalarField& a, const ScalarField& b);

}  // namespace tgvflow
