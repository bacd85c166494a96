#pragma once

#include "tgvflow/grid.hpp"

namespace tgvflow {

/// Local correlation baseline. For every pixel the window of f1 centred there
/// is compared against windows of f2 displaced by every integer offset in
/// [-search, search]^2 using zero-normalized cross-correlation (mirror
/// boundary). The best offset is refined per axis with a 3-point parabola.
/// Equal scores prefer the smaller displacement; a window of f1 with zero
/// variance yields displacement 0. Convention matches the solver:
/// f1(x) ~ f2(x + u(x)).
DisplacementField block_match_baseline(const ScalarField& f1, const ScalarField& f2,
                                       int window, int search);

}  // namespace tgvflow
