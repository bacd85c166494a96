#pragma once

// Serial reference implementation, kept for testing and benchmarking the
// OpenMP kernels. Operators are assembled as explicit sparse matrices so the
// adjoints are literal transposes rather than hand-derived stencils.

#include <vector>

#include "tgvflow/dataterm.hpp"
#include "tgvflow/grid.hpp"
#include "tgvflow/solver.hpp"

namespace tgvflow::reference {

struct Triplet {
  int row;
  int col;
  double value;
};

struct SparseOp {
  int rows = 0;
  int cols = 0;
  std::vector<Triplet> entries;

  std::vector<double> apply(const std::vector<double>& x) const;
  std::vector<double> apply_transpose(const std::vector<double>& y) const;
};

/// Forward differences of one plane: N columns, 2N rows ordered (dx, dy).
SparseOp forward_gradient(int width, int height);
/// Symmetrized backward differences of a 2-plane field: 2N columns, 3N rows.
SparseOp symmetrized_backward(int width, int height);
/// Composition symmetrized_backward * forward_gradient: N columns, 3N rows.
SparseOp second_difference(int width, int height);

/// Plane-major flattening helpers.
std::vector<double> flatten(const ScalarField& f);
template <std::size_t N>
std::vector<double> flatten(const PlaneStack<N>& s) {
  std::vector<double> out;
  for (const auto& p : s.planes) out.insert(out.end(), p.values().begin(), p.values().end());
  return out;
}

/// The eight TGV updates written out literally with the sparse operators.
void tgv_step(SolverState& state, const LinearizedData& L, const SolverParams& p);

}  // namespace tgvflow::reference
