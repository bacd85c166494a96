#pragma once

#include <random>

#include "tgvflow/dataterm.hpp"
#include "tgvflow/grid.hpp"

namespace testutil {

inline tgvflow::ScalarField random_field(int w, int h, std::mt19937_64& rng, double lo = -1.0,
                                         double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  tgvflow::ScalarField f(w, h);
  for (double& v : f.values()) v = d(rng);
  return f;
}

template <std::size_t N>
tgvflow::PlaneStack<N> random_stack(int w, int h, std::mt19937_64& rng) {
  tgvflow::PlaneStack<N> s;
  for (auto& p : s.planes) p = random_field(w, h, rng);
  return s;
}

inline tgvflow::DisplacementField random_flow(int w, int h, std::mt19937_64& rng) {
  return {random_field(w, h, rng), random_field(w, h, rng)};
}

inline double dot(const tgvflow::ScalarField& a, const tgvflow::ScalarField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

template <std::size_t N>
double dot(const tgvflow::PlaneStack<N>& a, const tgvflow::PlaneStack<N>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < N; ++k) s += dot(a[k], b[k]);
  return s;
}

inline double max_abs_diff(const tgvflow::ScalarField& a, const tgvflow::ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline tgvflow::LinearizedData random_data(int w, int h, std::mt19937_64& rng) {
  return {random_field(w, h, rng), random_field(w, h, rng), random_field(w, h, rng, -0.2, 0.2)};
}

}  // namespace testutil
