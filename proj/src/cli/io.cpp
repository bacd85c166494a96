#include "tgvflow/cli/io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include "json.hpp"
#include "tgvflow/errors.hpp"

namespace tgvflow::io {

namespace fs = std::filesystem;

namespace {

std::string lower_extension(const fs::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

// Next whitespace-delimited header token, skipping '#' comments.
std::string pnm_token(std::istream& in) {
  std::string tok;
  char c;
  while (in.get(c)) {
    if (c == '#') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(c);
  }
  return tok;
}

ScalarField read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string magic = pnm_token(in);
  if (magic != "P5" && magic != "P2") throw IoError(path.string() + ": not a grayscale PGM");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(pnm_token(in));
    h = std::stoi(pnm_token(in));
    maxval = std::stoi(pnm_token(in));
  } catch (const std::exception&) {
    throw IoError(path.string() + ": malformed PGM header");
  }
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535)
    throw IoError(path.string() + ": malformed PGM header");
  ScalarField f(w, h);
  const double scale = 1.0 / maxval;
  if (magic == "P2") {
    for (std::size_t i = 0; i < f.size(); ++i) {
      int v;
      if (!(in >> v)) throw IoError(path.string() + ": truncated PGM");
      f[i] = v * scale;
    }
    return f;
  }
  const bool wide = maxval > 255;
  std::vector<unsigned char> buf(f.size() * (wide ? 2 : 1));
  if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size())))
    throw IoError(path.string() + ": truncated PGM");
  for (std::size_t i = 0; i < f.size(); ++i) {
    const unsigned v = wide ? (unsigned(buf[2 * i]) << 8) | buf[2 * i + 1] : buf[i];
    f[i] = v * scale;
  }
  return f;
}

struct FileCloser {
  void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

ScalarField read_png(const fs::path& path) {
  FilePtr fp(std::fopen(path.string().c_str(), "rb"));
  if (!fp) throw IoError("cannot open " + path.string());
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(path.string() + ": invalid PNG");
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);
  const auto w = static_cast<int>(png_get_image_width(png, info));
  const auto h = static_cast<int>(png_get_image_height(png, info));
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color != PNG_COLOR_TYPE_GRAY && color != PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(path.string() + ": expected a grayscale PNG");
  }
  if (depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);
  const bool wide = png_get_bit_depth(png, info) == 16;
  const std::size_t row_bytes = png_get_rowbytes(png, info);
  std::vector<unsigned char> data(row_bytes * static_cast<std::size_t>(h));
  std::vector<png_bytep> rows(static_cast<std::size_t>(h));
  for (int y = 0; y < h; ++y) rows[static_cast<std::size_t>(y)] = data.data() + row_bytes * static_cast<std::size_t>(y);
  png_read_image(png, rows.data());
  png_destroy_read_struct(&png, &info, nullptr);

  ScalarField f(w, h);
  for (int y = 0; y < h; ++y) {
    const unsigned char* row = rows[static_cast<std::size_t>(y)];
    for (int x = 0; x < w; ++x) {
      f(x, y) = wide ? ((unsigned(row[2 * x]) << 8) | row[2 * x + 1]) / 65535.0 : row[x] / 255.0;
    }
  }
  return f;
}

void put_f32_le(std::ostream& out, float v) {
  auto bits = std::bit_cast<std::uint32_t>(v);
  unsigned char b[4];
  for (int k = 0; k < 4; ++k) b[k] = static_cast<unsigned char>((bits >> (8 * k)) & 0xffu);
  out.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace

ScalarField read_image(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("cannot open " + path.string());
  const auto ext = lower_extension(path);
  if (ext == ".field") return read_fields(path).planes.at(0);
  if (ext == ".png") return read_png(path);
  return read_pgm(path);
}

void write_pgm16(const fs::path& path, const ScalarField& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << f.width() << ' ' << f.height() << "\n65535\n";
  std::vector<unsigned char> buf(f.size() * 2);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto v = static_cast<unsigned>(std::lround(std::clamp(f[i], 0.0, 1.0) * 65535.0));
    buf[2 * i] = static_cast<unsigned char>(v >> 8);
    buf[2 * i + 1] = static_cast<unsigned char>(v & 0xffu);
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

void write_png_rgb(const fs::path& path, int width, int height,
                   const std::vector<unsigned char>& rgb) {
  FilePtr fp(std::fopen(path.string().c_str(), "wb"));
  if (!fp) throw IoError("cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("cannot write " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y) {
    auto* row = const_cast<unsigned char*>(rgb.data() + static_cast<std::size_t>(y) * width * 3);
    png_write_row(png, row);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

const ScalarField& FieldFile::plane(const std::string& name) const {
  for (std::size_t k = 0; k < names.size(); ++k)
    if (names[k] == name) return planes[k];
  throw ValidationError("field file has no plane named '" + name + "'");
}

void write_fields(const fs::path& path,
                  const std::vector<std::pair<std::string, ScalarField>>& planes) {
  if (planes.empty()) throw ValidationError("write_fields: no planes");
  const auto& first = planes.front().second;
  nlohmann::json header;
  header["width"] = first.width();
  header["height"] = first.height();
  header["planes"] = planes.size();
  header["names"] = nlohmann::json::array();
  for (const auto& [name, f] : planes) {
    if (!f.same_shape(first)) throw ValidationError("write_fields: planes differ in size");
    header["names"].push_back(name);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << header.dump() << '\n';
  for (const auto& [name, f] : planes)
    for (double v : f.values()) put_f32_le(out, static_cast<float>(v));
  if (!out) throw IoError("cannot write " + path.string());
}

FieldFile read_fields(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": missing header");
  FieldFile ff;
  std::size_t count = 0;
  try {
    const auto header = nlohmann::json::parse(line);
    ff.width = header.at("width").get<int>();
    ff.height = header.at("height").get<int>();
    count = header.at("planes").get<std::size_t>();
    ff.names = header.at("names").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": bad header: " + e.what());
  }
  if (ff.width <= 0 || ff.height <= 0 || count == 0 || ff.names.size() != count)
    throw IoError(path.string() + ": inconsistent header");
  const std::size_t n = static_cast<std::size_t>(ff.width) * ff.height;
  std::vector<unsigned char> buf(n * 4);
  for (std::size_t k = 0; k < count; ++k) {
    if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size())))
      throw IoError(path.string() + ": truncated data");
    ScalarField f(ff.width, ff.height);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t bits = 0;
      for (int b = 0; b < 4; ++b) bits |= std::uint32_t(buf[4 * i + b]) << (8 * b);
      f[i] = static_cast<double>(std::bit_cast<float>(bits));
    }
    ff.planes.push_back(std::move(f));
  }
  return ff;
}

ScalarField quantize_float32(const ScalarField& f) {
  ScalarField q = f;
  for (double& v : q.values()) v = static_cast<double>(static_cast<float>(v));
  return q;
}

DisplacementField read_flow(const fs::path& path) {
  const auto ff = read_fields(path);
  if (ff.planes.size() < 2) throw ValidationError(path.string() + ": expected two flow planes");
  return {ff.planes[0], ff.planes[1]};
}

}  // namespace tgvflow::io
