#pragma once

// Internal helpers for OpenMP loops. Reductions are done per row and summed
// serially so results do not depend on the thread count.

#include <vector>

namespace tgvflow::detail {

template <class RowFn>
double row_sum(int rows, RowFn&& row_fn) {
  std::vector<double> partial(static_cast<std::size_t>(rows), 0.0);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < rows; ++y) partial[static_cast<std::size_t>(y)] = row_fn(y);
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

template <class RowFn>
double row_max(int rows, RowFn&& row_fn) {
  std::vector<double> partial(static_cast<std::size_t>(rows), 0.0);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < rows; ++y) partial[static_cast<std::size_t>(y)] = row_fn(y);
  double best = 0.0;
  for (double v : partial) best = v > best ? v : best;
  return best;
}

}  // namespace tgvflow::detail
