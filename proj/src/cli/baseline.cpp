#include "tgvflow/cli/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "tgvflow/errors.hpp"

namespace tgvflow {

namespace {

struct Offset {
  int dx;
  int dy;
};

// All offsets in [-s, s]^2, ordered by magnitude so that a strict
// improvement test keeps the smallest displacement on ties.
std::vector<Offset> search_order(int s) {
  std::vector<Offset> out;
  for (int dy = -s; dy <= s; ++dy)
    for (int dx = -s; dx <= s; ++dx) out.push_back({dx, dy});
  std::stable_sort(out.begin(), out.end(), [](const Offset& a, const Offset& b) {
    return a.dx * a.dx + a.dy * a.dy < b.dx * b.dx + b.dy * b.dy;
  });
  return out;
}

// Vertex of the parabola through (-1, sm), (0, s0), (1, sp), limited to half a pixel.
double parabolic_offset(double sm, double s0, double sp) {
  const double denom = sm - 2.0 * s0 + sp;
  if (!(denom < 0.0)) return 0.0;
  return std::clamp(0.5 * (sm - sp) / denom, -0.5, 0.5);
}

}  // namespace

DisplacementField block_match_baseline(const ScalarField& f1, const ScalarField& f2, int window,
                                       int search) {
  if (!f1.same_shape(f2)) throw ValidationError("input images differ in size");
  if (window < 1 || window % 2 == 0) throw ValidationError("window must be a positive odd integer");
  if (window > std::min(f1.width(), f1.height()))
    throw ValidationError("window exceeds the image size");
  if (search < 0) throw ValidationError("search range must be >= 0");

  const int w = f1.width(), h = f1.height(), r = window / 2;
  const int side = 2 * search + 1;
  const auto order = search_order(search);
  auto u = DisplacementField::zeros(w, h);
  const double n = static_cast<double>(window) * window;

#pragma omp parallel for schedule(dynamic)
  for (int y = 0; y < h; ++y) {
    std::vector<double> ref(static_cast<std::size_t>(window) * window);
    std::vector<double> scores(static_cast<std::size_t>(side) * side);
    for (int x = 0; x < w; ++x) {
      double mean1 = 0.0;
      for (int j = -r, k = 0; j <= r; ++j)
        for (int i = -r; i <= r; ++i, ++k) {
          ref[static_cast<std::size_t>(k)] = f1(mirror_index(x + i, w), mirror_index(y + j, h));
          mean1 += ref[static_cast<std::size_t>(k)];
        }
      mean1 /= n;
      double var1 = 0.0;
      for (double& v : ref) {
        v -= mean1;
        var1 += v * v;
      }
      if (var1 <= 1e-12 * n) continue;

      for (const auto& o : order) {
        double sum2 = 0.0, sq2 = 0.0, cross = 0.0;
        for (int j = -r, k = 0; j <= r; ++j)
          for (int i = -r; i <= r; ++i, ++k) {
            const double v = f2(mirror_index(x + o.dx + i, w), mirror_index(y + o.dy + j, h));
            sum2 += v;
            sq2 += v * v;
            cross += ref[static_cast<std::size_t>(k)] * v;
          }
        const double var2 = sq2 - sum2 * sum2 / n;
        const double score = var2 > 1e-12 * n ? cross / std::sqrt(var1 * var2) : 0.0;
        scores[static_cast<std::size_t>((o.dy + search) * side + o.dx + search)] = score;
      }

      Offset best{0, 0};
      double best_score = -std::numeric_limits<double>::infinity();
      for (const auto& o : order) {
        const double s = scores[static_cast<std::size_t>((o.dy + search) * side + o.dx + search)];
        if (s > best_score) {
          best_score = s;
          best = o;
        }
      }
      auto at = [&](int dx, int dy) {
        return scores[static_cast<std::size_t>((dy + search) * side + dx + search)];
      };
      double sx = 0.0, sy = 0.0;
      // A perfect match is already exact; refinement would only add noise.
      if (best_score < 1.0 - 1e-9) {
        if (std::abs(best.dx) < search)
          sx = parabolic_offset(at(best.dx - 1, best.dy), best_score, at(best.dx + 1, best.dy));
        if (std::abs(best.dy) < search)
          sy = parabolic_offset(at(best.dx, best.dy - 1), best_score, at(best.dx, best.dy + 1));
      }
      u.u1(x, y) = best.dx + sx;
      u.u2(x, y) = best.dy + sy;
    }
  }
  return u;
}

}  // namespace tgvflow
