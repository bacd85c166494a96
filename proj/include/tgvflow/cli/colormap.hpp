#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "tgvflow/grid.hpp"

namespace tgvflow {

using Rgb = std::array<unsigned char, 3>;

/// 256-entry cubehelix table (start 0.5, rotations -1.5, hue 1, gamma 1),
/// monotone in luminance from black to white.
const std::array<Rgb, 256>& colormap_table();

/// Interleaved RGB bytes of field mapped linearly from [vmin, vmax] onto the
/// table, clamped at both ends. If background is given (same shape, values in
/// [0,1]) the colours are blended 50/50 with its gray level.
/// Throws ValidationError unless vmin < vmax.
std::vector<unsigned char> colorize(const ScalarField& field, double vmin, double vmax,
                                    const ScalarField* background = nullptr);

/// colorize and write an 8-bit RGB PNG.
void render_colormap(const ScalarField& field, double vmin, double vmax,
                     const std::filesystem::path& out_path,
                     const ScalarField* background = nullptr);

}  // namespace tgvflow
