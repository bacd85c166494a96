#include "tgvflow/pyramid.hpp"

#include <algorithm>
#include <cmath>

#include "tgvflow/errors.hpp"

namespace tgvflow {

void PyramidParams::validate() const {
  if (!(factor > 0.0 && factor < 1.0)) throw ValidationError("pyramid factor must lie in (0,1)");
  if (min_dim < 1) throw ValidationError("min_dim must be positive");
  if (warps_per_level < 1) throw ValidationError("warps_per_level must be positive");
  if (median_radius < 0) throw ValidationError("median_radius must be >= 0");
}

int pyramid_levels(int width, int height, const PyramidParams& pp) {
  const int side = std::min(width, height);
  if (side < pp.min_dim) return 1;
  const double ratio = std::log(static_cast<double>(pp.min_dim) / side) / std::log(pp.factor);
  return std::max(1, static_cast<int>(std::floor(ratio + 1e-9)) + 1);
}

std::vector<ScalarField> build_pyramid(const ScalarField& f, const PyramidParams& pp) {
  pp.validate();
  const int levels = pyramid_levels(f.width(), f.height(), pp);
  std::vector<ScalarField> pyr;
  pyr.reserve(static_cast<std::size_t>(levels));
  pyr.push_back(f);
  for (int l = 1; l < levels; ++l) pyr.push_back(downsample(pyr.back(), pp.factor));
  std::reverse(pyr.begin(), pyr.end());
  return pyr;
}

namespace {

GradientField resample_planes(const GradientField& a, int w, int h) {
  GradientField out;
  for (std::size_t k = 0; k < GradientField::kPlanes; ++k) out[k] = resample(a[k], w, h);
  return out;
}

}  // namespace

SolveResult coarse_to_fine_solve(const ScalarField& f1, const ScalarField& f2,
                                 const SolverParams& sp, const PyramidParams& pp) {
  sp.validate();
  pp.validate();
  if (!f1.same_shape(f2)) throw ValidationError("input images differ in size");

  const auto pyr1 = build_pyramid(f1, pp);
  const auto pyr2 = build_pyramid(f2, pp);

  auto u = DisplacementField::zeros(pyr1.front().width(), pyr1.front().height());
  GradientField a = GradientField::zeros(u.width(), u.height());
  SolveResult result;

  for (std::size_t level = 0; level < pyr1.size(); ++level) {
    const auto& g1 = pyr1[level];
    const auto& g2 = pyr2[level];
    if (level > 0) {
      u = upsample_flow(u, g1.width(), g1.height(), 1.0 / pp.factor);
      a = resample_planes(a, g1.width(), g1.height());
    }
    for (int warp = 0; warp < pp.warps_per_level; ++warp) {
      result = solve_level(g1, g2, u, sp, &a);
      u = result.u;
      if (pp.median_radius > 0) {
        u.u1 = median_filter(u.u1, pp.median_radius);
        u.u2 = median_filter(u.u2, pp.median_radius);
      }
      a = result.a;
    }
  }
  result.u = std::move(u);
  return result;
}

}  // namespace tgvflow
