#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace tgvflow {

/// Row-major W x H grid of doubles. Pixel (x, y) sits at integer coordinates,
/// x indexing columns and y indexing rows.
class ScalarField {
public:
  ScalarField() = default;
  ScalarField(int width, int height, double fill = 0.0);
  ScalarField(int width, int height, std::vector<double> values);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double operator()(int x, int y) const noexcept { return values_[index(x, y)]; }
  double& operator()(int x, int y) noexcept { return values_[index(x, y)]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  bool same_shape(const ScalarField& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  friend bool operator==(const ScalarField&, const ScalarField&) = default;

private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> values_;
};

/// A fixed number of equally sized planes.
template <std::size_t N>
struct PlaneStack {
  static constexpr std::size_t kPlanes = N;
  std::array<ScalarField, N> planes;

  static PlaneStack zeros(int width, int height) {
    PlaneStack s;
    for (auto& p : s.planes) p = ScalarField(width, height);
    return s;
  }

  int width() const noexcept { return planes[0].width(); }
  int height() const noexcept { return planes[0].height(); }
  ScalarField& operator[](std::size_t k) noexcept { return planes[k]; }
  const ScalarField& operator[](std::size_t k) const noexcept { return planes[k]; }

  bool consistent() const noexcept {
    for (const auto& p : planes)
      if (!p.same_shape(planes[0])) return false;
    return true;
  }

  friend bool operator==(const PlaneStack&, const PlaneStack&) = default;
};

/// Planes (dx u1, dy u1, dx u2, dy u2). Also used for the auxiliary
/// variable a, the split variable s and the dual b1.
using GradientField = PlaneStack<4>;

/// Planes (dx a1, (dy a1 + dx a2)/2, dy a2) for the first 2-vector block,
/// followed by the same three planes for the second block.
using SymGradField = PlaneStack<6>;

/// Second differences of one scalar plane: (pxx, (pxy + pyx)/2, pyy).
using HessianField = PlaneStack<3>;

struct DisplacementField {
  ScalarField u1;  // x displacement, pixels
  ScalarField u2;  // y displacement, pixels

  static DisplacementField zeros(int width, int height) {
    return {ScalarField(width, height), ScalarField(width, height)};
  }
  int width() const noexcept { return u1.width(); }
  int height() const noexcept { return u1.height(); }
  bool consistent() const noexcept { return u1.same_shape(u2); }

  friend bool operator==(const DisplacementField&, const DisplacementField&) = default;
};

struct StrainField {
  ScalarField eps11;
  ScalarField eps12;
  ScalarField eps22;
};

/// Whole-sample reflection of an index into [0, n).
int mirror_index(int i, int n) noexcept;

/// Bilinear interpolation with mirror boundary. Throws ValidationError on
/// non-finite coordinates.
double sample_bilinear(const ScalarField& f, double x, double y);

/// Median of the mirror-extended (2r+1)^2 window around every pixel.
ScalarField median_filter(const ScalarField& f, int radius);

/// Bilinear resampling onto a new grid with pixel centres aligned.
ScalarField resample(const ScalarField& f, int new_width, int new_height);

/// Binomial [1 4 6 4 1]/16 prefilter followed by resampling to
/// (ceil(W*factor), ceil(H*factor)). factor must lie in (0, 1).
ScalarField downsample(const ScalarField& f, double factor);

/// Separable [1 4 6 4 1]/16 smoothing with mirror boundary.
ScalarField binomial_smooth(const ScalarField& f);

/// Spatial resampling of both components followed by value scaling.
DisplacementField upsample_flow(const DisplacementField& u, int new_width, int new_height,
                                double value_scale);

bool all_finite(const ScalarField& f) noexcept;

}  // namespace tgvflow
