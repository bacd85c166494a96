#include "tgvflow/cli/colormap.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tgvflow/cli/io.hpp"
#include "tgvflow/errors.hpp"

namespace tgvflow {

namespace {

std::array<Rgb, 256> build_cubehelix() {
  constexpr double start = 0.5, rotations = -1.5, hue = 1.0, gamma = 1.0;
  std::array<Rgb, 256> table{};
  for (int i = 0; i < 256; ++i) {
    const double l = std::pow(i / 255.0, gamma);
    const double phi = 2.0 * std::numbers::pi * (start / 3.0 + rotations * (i / 255.0));
    const double amp = hue * l * (1.0 - l) / 2.0;
    const double c = std::cos(phi), s = std::sin(phi);
    const double rgb[3] = {l + amp * (-0.14861 * c + 1.78277 * s),
                           l + amp * (-0.29227 * c - 0.90649 * s),
                           l + amp * (1.97294 * c)};
    for (int k = 0; k < 3; ++k)
      table[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
          static_cast<unsigned char>(std::lround(std::clamp(rgb[k], 0.0, 1.0) * 255.0));
  }
  return table;
}

}  // namespace

const std::array<Rgb, 256>& colormap_table() {
  static const auto table = build_cubehelix();
  return table;
}

std::vector<unsigned char> colorize(const ScalarField& field, double vmin, double vmax,
                                    const ScalarField* background) {
  if (!(vmin < vmax)) throw ValidationError("colormap range requires vmin < vmax");
  if (background && !background->same_shape(field))
    throw ValidationError("overlay background differs in size");
  const auto& table = colormap_table();
  std::vector<unsigned char> rgb(field.size() * 3);
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double v = std::isnan(field[i]) ? vmin : field[i];
    const double t = std::clamp((v - vmin) / (vmax - vmin), 0.0, 1.0);
    const auto& c = table[static_cast<std::size_t>(std::lround(t * 255.0))];
    for (std::size_t k = 0; k < 3; ++k) {
      double out = c[k];
      if (background) out = 0.5 * out + 0.5 * 255.0 * std::clamp((*background)[i], 0.0, 1.0);
      rgb[3 * i + k] = static_cast<unsigned char>(std::lround(out));
    }
  }
  return rgb;
}

void render_colormap(const ScalarField& field, double vmin, double vmax,
                     const std::filesystem::path& out_path, const ScalarField* background) {
  io::write_png_rgb(out_path, field.width(), field.height(),
                    colorize(field, vmin, vmax, background));
}

}  // namespace tgvflow
