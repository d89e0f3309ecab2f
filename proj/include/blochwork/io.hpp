#pragma once

// Output writers shared by the CLI: round-trippable CSV, a deterministic
// PNG heatmap renderer, the quarter-sphere mesh text format, and SHA-256
// content digests for run manifests.
//
// Requires libpng and OpenSSL (link PNG::PNG and OpenSSL::Crypto).

#include <png.h>
#include <openssl/evp.h>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "blochwork/atlas.hpp"
#include "blochwork/errors.hpp"
#include "blochwork/fields.hpp"

namespace blochwork::io {

/// Shortest text form that still round-trips an IEEE double (17 significant
/// digits).
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_text_file(const std::string& path,
                            const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Minimal CSV builder: comma separator, '.' decimal point, mandatory
/// header row, one trailing newline per row.
class CsvBuilder {
 public:
  explicit CsvBuilder(const std::vector<std::string>& header) {
    append_row_of_strings(header);
  }

  void append_row(const std::vector<double>& row) {
    std::vector<std::string> cells;
    cells.reserve(row.size());
    for (double v : row) cells.push_back(format_double(v));
    append_row_of_strings(cells);
  }

  const std::string& str() const { return text_; }

 private:
  void append_row_of_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text_ += ',';
      text_ += cells[i];
    }
    text_ += '\n';
  }
  std::string text_;
};

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
};

/// Diverging palette symmetric about zero: blue for negative, white at
/// zero, red for positive. t must lie in [-1, 1].
inline Rgb diverging_color(double t) {
  const auto mix = [](double a, double b, double f) {
    return static_cast<std::uint8_t>(a + (b - a) * f + 0.5);
  };
  const Rgb blue{59, 76, 192}, white{255, 255, 255}, red{180, 4, 38};
  if (t < 0.0) {
    const double f = 1.0 + t;  // 0 at -1, 1 at 0
    return {mix(blue.r, white.r, f), mix(blue.g, white.g, f),
            mix(blue.b, white.b, f)};
  }
  return {mix(white.r, red.r, t), mix(white.g, red.g, t),
          mix(white.b, red.b, t)};
}

inline void write_png(const std::string& path, int width, int height,
                      const std::vector<Rgb>& pixels) {
  if (static_cast<std::size_t>(width) * height != pixels.size())
    throw ValidationError("write_png: pixel buffer size mismatch");
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw IoError("cannot open for writing: " + path);
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    std::fclose(fp);
    throw IoError("libpng failure while writing: " + path);
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_byte> row(static_cast<std::size_t>(width) * 3);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const Rgb& px = pixels[static_cast<std::size_t>(y) * width + x];
      row[3 * x + 0] = px.r;
      row[3 * x + 1] = px.g;
      row[3 * x + 2] = px.b;
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

struct HeatmapOptions {
  /// Each grid cell becomes a cell_px x cell_px block of flat color (no
  /// interpolation); 0 picks a size so the longer image edge is >= 512 px.
  int cell_px = 0;
  /// Draw a dashed vertical line at this axis2 coordinate.
  std::vector<double> dashed_vertical;
  /// Draw a dashed horizontal line at this axis1 coordinate.
  std::vector<double> dashed_horizontal;
};

/// Render a field as a heatmap. Rows are laid out with the *last* axis1
/// sample at the top, so the image has axis1 increasing upward and axis2
/// increasing to the right. Masked cells render gray.
inline void write_heatmap_png(const std::string& path,
                              const ScalarField2D& field,
                              HeatmapOptions options = {}) {
  field.check_consistent();
  const auto n1 = static_cast<int>(field.rows());
  const auto n2 = static_cast<int>(field.cols());
  int cell = options.cell_px;
  if (cell <= 0) cell = std::max(1, 512 / std::max(n1, n2));
  const int width = n2 * cell, height = n1 * cell;

  double vmax = 0.0;
  for (std::size_t k = 0; k < field.values.size(); ++k)
    if (!field.mask[k]) vmax = std::max(vmax, std::abs(field.values[k]));

  std::vector<Rgb> pixels(static_cast<std::size_t>(width) * height);
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      const Rgb color =
          field.masked(i, j)
              ? Rgb{128, 128, 128}
              : diverging_color(vmax > 0.0 ? field.at(i, j) / vmax : 0.0);
      const int y0 = (n1 - 1 - i) * cell, x0 = j * cell;
      for (int dy = 0; dy < cell; ++dy)
        for (int dx = 0; dx < cell; ++dx)
          pixels[static_cast<std::size_t>(y0 + dy) * width + x0 + dx] = color;
    }
  }

  // Dashed overlays: 6 px on, 4 px off, drawn at the pixel column/row whose
  // cell center is nearest the requested coordinate (clamped to the edge
  // when the coordinate lies outside the sampled range).
  const auto nearest_index = [](const std::vector<double>& axis, double v) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < axis.size(); ++k)
      if (std::abs(axis[k] - v) < std::abs(axis[best] - v)) best = k;
    return best;
  };
  const Rgb black{0, 0, 0};
  for (double v : options.dashed_vertical) {
    const int x = static_cast<int>(nearest_index(field.axis2.values, v)) *
                      cell + cell / 2;
    for (int y = 0; y < height; ++y)
      if (y % 10 < 6) pixels[static_cast<std::size_t>(y) * width + x] = black;
  }
  for (double v : options.dashed_horizontal) {
    const int i = static_cast<int>(nearest_index(field.axis1.values, v));
    const int y = (n1 - 1 - i) * cell + cell / 2;
    for (int x = 0; x < width; ++x)
      if (x % 10 < 6) pixels[static_cast<std::size_t>(y) * width + x] = black;
  }
  write_png(path, width, height, pixels);
}

/// Plain-text mesh: "v C P E value" vertex lines, "f i j k" one-based
/// faces, and the pure-state boundary E = 0 as a labeled "l ..." polyline.
inline std::string format_quarter_sphere_mesh(const QuarterSphereMesh& mesh) {
  std::string out;
  out += "# triality quarter-sphere, per-vertex regularized curvature\n";
  for (const auto& v : mesh.vertices) {
    out += "v " + format_double(v.coherence) + ' ' +
           format_double(v.predictability) + ' ' + format_double(v.deficit) +
           ' ' + format_double(v.value) + '\n';
  }
  for (const auto& f : mesh.faces) {
    out += "f " + std::to_string(f[0] + 1) + ' ' + std::to_string(f[1] + 1) +
           ' ' + std::to_string(f[2] + 1) + '\n';
  }
  out += "# polyline: pure-state boundary (E = 0), dashed meridian\n";
  out += "l";
  for (std::uint32_t idx : mesh.pure_state_boundary)
    out += ' ' + std::to_string(idx + 1);
  out += '\n';
  return out;
}

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(),
                  nullptr))
    throw IoError("SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

inline std::string sha256_file(const std::string& path) {
  return sha256_hex(read_text_file(path));
}

}  // namespace blochwork::io
