#include "tgvflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tgvflow/errors.hpp"

namespace tgvflow {

ScalarField::ScalarField(int width, int height, double fill)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0)
    throw ValidationError("field dimensions must be positive, got " + std::to_string(width) +
                          "x" + std::to_string(height));
  values_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

ScalarField::ScalarField(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (width <= 0 || height <= 0)
    throw ValidationError("field dimensions must be positive");
  if (values_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw ValidationError("value count does not match field dimensions");
}

int mirror_index(int i, int n) noexcept {
  if (n <= 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

double sample_bilinear(const ScalarField& f, double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y)) throw ValidationError("invalid sample coordinate");
  const double fx0 = std::floor(x);
  const double fy0 = std::floor(y);
  const double tx = x - fx0;
  const double ty = y - fy0;
  const int w = f.width();
  const int h = f.height();
  const int x0 = static_cast<int>(fx0);
  const int y0 = static_cast<int>(fy0);
  const int xa = mirror_index(x0, w);
  const int xb = mirror_index(x0 + 1, w);
  const int ya = mirror_index(y0, h);
  const int yb = mirror_index(y0 + 1, h);
  // Written as base + t * delta so constants are reproduced exactly.
  const double top = f(xa, ya) + tx * (f(xb, ya) - f(xa, ya));
  const double bottom = f(xa, yb) + tx * (f(xb, yb) - f(xa, yb));
  return top + ty * (bottom - top);
}

ScalarField median_filter(const ScalarField& f, int radius) {
  if (radius < 1) throw ValidationError("median radius must be >= 1");
  const int w = f.width();
  const int h = f.height();
  const int side = 2 * radius + 1;
  ScalarField out(w, h);
#pragma omp parallel
  {
    std::vector<double> window(static_cast<std::size_t>(side * side));
#pragma omp for schedule(static)
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        std::size_t k = 0;
        for (int dy = -radius; dy <= radius; ++dy) {
          const int yy = mirror_index(y + dy, h);
          for (int dx = -radius; dx <= radius; ++dx) window[k++] = f(mirror_index(x + dx, w), yy);
        }
        auto mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);
        std::nth_element(window.begin(), mid, window.end());
        out(x, y) = *mid;
      }
    }
  }
  return out;
}

ScalarField resample(const ScalarField& f, int new_width, int new_height) {
  ScalarField out(new_width, new_height);
  const double sx = static_cast<double>(f.width()) / new_width;
  const double sy = static_cast<double>(f.height()) / new_height;
#pragma omp parallel for schedule(static)
  for (int y = 0; y < new_height; ++y) {
    const double oy = (y + 0.5) * sy - 0.5;
    for (int x = 0; x < new_width; ++x) out(x, y) = sample_bilinear(f, (x + 0.5) * sx - 0.5, oy);
  }
  return out;
}

namespace {

// 5-tap binomial along one axis, expressed as centre plus weighted
// deviations so constant input passes through bit-exactly.
ScalarField binomial_pass(const ScalarField& f, bool along_x) {
  const int w = f.width();
  const int h = f.height();
  ScalarField out(w, h);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      auto at = [&](int d) {
        return along_x ? f(mirror_index(x + d, w), y) : f(x, mirror_index(y + d, h));
      };
      const double c = f(x, y);
      const double dev = (at(-2) - c) + (at(2) - c) + 4.0 * ((at(-1) - c) + (at(1) - c));
      out(x, y) = c + dev / 16.0;
    }
  }
  return out;
}

}  // namespace

ScalarField binomial_smooth(const ScalarField& f) {
  return binomial_pass(binomial_pass(f, true), false);
}

ScalarField downsample(const ScalarField& f, double factor) {
  if (!(factor > 0.0 && factor < 1.0)) throw ValidationError("downsample factor must lie in (0,1)");
  const int nw = std::max(1, static_cast<int>(std::ceil(f.width() * factor - 1e-9)));
  const int nh = std::max(1, static_cast<int>(std::ceil(f.height() * factor - 1e-9)));
  return resample(binomial_smooth(f), nw, nh);
}

DisplacementField upsample_flow(const DisplacementField& u, int new_width, int new_height,
                                double value_scale) {
  if (new_width < u.width() || new_height < u.height())
    throw ValidationError("upsample_flow target must not be smaller than the source");
  DisplacementField out{resample(u.u1, new_width, new_height),
                        resample(u.u2, new_width, new_height)};
  for (auto* plane : {&out.u1, &out.u2})
    for (double& v : plane->values()) v *= value_scale;
  return out;
}

bool all_finite(const ScalarField& f) noexcept {
  return std::all_of(f.values().begin(), f.values().end(),
                     [](double v) { return std::isfinite(v); });
}

}  // namespace tgvflow
