#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "tgvflow/grid.hpp"

namespace tgvflow::io {

/// Grayscale PGM (P2/P5) or PNG, 8 or 16 bit, normalized to [0, 1].
/// Files ending in .field load their first plane unchanged.
ScalarField read_image(const std::filesystem::path& path);

/// 16-bit grayscale PGM (P5); values clamped to [0, 1].
void write_pgm16(const std::filesystem::path& path, const ScalarField& f);

/// 8-bit RGB PNG from interleaved rgb bytes.
void write_png_rgb(const std::filesystem::path& path, int width, int height,
                   const std::vector<unsigned char>& rgb);

/// Raw field file: a single-line JSON header
///   {"width":W,"height":H,"planes":P,"names":[...]}
/// followed by P*W*H little-endian float32 values, plane after plane,
/// each plane row-major.
struct FieldFile {
  int width = 0;
  int height = 0;
  std::vector<std::string> names;
  std::vector<ScalarField> planes;

  /// Plane by name; throws ValidationError if absent.
  const ScalarField& plane(const std::string& name) const;
};

void write_fields(const std::filesystem::path& path,
                  const std::vector<std::pair<std::string, ScalarField>>& planes);
FieldFile read_fields(const std::filesystem::path& path);

/// Round-trips a value through float32, matching what write_fields stores.
ScalarField quantize_float32(const ScalarField& f);

DisplacementField read_flow(const std::filesystem::path& path);

}  // namespace tgvflow::io
