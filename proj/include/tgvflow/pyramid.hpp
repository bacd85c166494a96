#pragma once

#include <vector>

#include "tgvflow/grid.hpp"
#include "tgvflow/solver.hpp"

namespace tgvflow {

struct PyramidParams {
  double factor = 0.5;
  int min_dim = 16;
  int warps_per_level = 3;
  int median_radius = 2;  // 0 disables the filter

  void validate() const;
};

/// Number of levels so that the coarsest side stays >= min_dim; at least 1.
int pyramid_levels(int width, int height, const PyramidParams& pp);

/// Repeated downsampling of f, coarsest level first, finest (f itself) last.
std::vector<ScalarField> build_pyramid(const ScalarField& f, const PyramidParams& pp);

/// Coarse-to-fine minimization. Every level runs warps_per_level cycles of
/// {linearize at the current flow, iterate, median filter u}; u is carried
/// to the next level scaled by 1/factor, a is carried unscaled.
SolveResult coarse_to_fine_solve(const ScalarField& f1, const ScalarField& f2,
                                 const SolverParams& sp, const PyramidParams& pp);

}  // namespace tgvflow
