// Copyright (c) 2026 The xyzcycle Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "xyzcycle/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <csetjmp>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "xyzcycle/error.hpp"

namespace xyzcycle::data {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct PngErrorState {
  char message[256] = {};
};

void png_error_handler(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
  if (state) std::snprintf(state->message, sizeof(state->message), "%s", msg);
  png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

[[noreturn]] void format_error(const std::filesystem::path& path, const std::string& what) {
  throw FormatError(path.string() + ": " + what);
}

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

struct PngHeader {
  png_uint_32 width = 0, height = 0;
  int bit_depth = 0, color_type = 0;
};

// Returns false on a libpng error; `state.message` then holds the reason.
// Locals that outlive a longjmp are declared by the caller.
bool read_png_rows(std::FILE* file, PngHeader& header, std::vector<unsigned char>& buffer,
                   PngErrorState& state, bool& wrong_channels) {
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, &state, png_error_handler, png_warning_handler);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_init_io(png, file);
  png_read_info(png, info);
  png_get_IHDR(png, info, &header.width, &header.height, &header.bit_depth, &header.color_type,
               nullptr, nullptr, nullptr);
  if (header.color_type != PNG_COLOR_TYPE_RGB || (header.bit_depth != 8 && header.bit_depth != 16)) {
    wrong_channels = header.color_type != PNG_COLOR_TYPE_RGB;
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
  }
  const std::size_t row_bytes = png_get_rowbytes(png, info);
  buffer.resize(row_bytes * header.height);
  for (png_uint_32 y = 0; y < header.height; ++y) png_read_row(png, buffer.data() + y * row_bytes, nullptr);
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

bool write_png_rows(std::FILE* file, int width, int height, int bit_depth,
                    const std::vector<unsigned char>& buffer, PngErrorState& state) {
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, &state, png_error_handler, png_warning_handler);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, file);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
               bit_depth, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  // Fixed header: no timestamps, so identical images give identical files.
  png_write_info(png, info);
  const std::size_t row_bytes = static_cast<std::size_t>(width) * 3 * (bit_depth / 8);
  for (int y = 0; y < height; ++y) {
    png_write_row(png, buffer.data() + static_cast<std::size_t>(y) * row_bytes);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

}  // namespace

PlanarImage load_png(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.string().c_str(), "rb"));
  if (!file) format_error(path, "cannot open for reading");
  unsigned char signature[8];
  if (std::fread(signature, 1, 8, file.get()) != 8 || png_sig_cmp(signature, 0, 8) != 0) {
    format_error(path, "not a PNG file");
  }
  std::rewind(file.get());

  PngHeader header;
  std::vector<unsigned char> buffer;
  PngErrorState state;
  bool wrong_channels = false;
  if (!read_png_rows(file.get(), header, buffer, state, wrong_channels)) {
    format_error(path, std::string("corrupt PNG: ") + state.message);
  }
  if (wrong_channels) {
    format_error(path, "expected 3-channel RGB PNG (color type " +
                           std::to_string(header.color_type) + ")");
  }
  if (buffer.empty()) {
    format_error(path, "unsupported PNG bit depth " + std::to_string(header.bit_depth));
  }

  const int h = static_cast<int>(header.height), w = static_cast<int>(header.width);
  PlanarImage img(h, w);
  const std::size_t n = img.size();
  if (header.bit_depth == 8) {
    for (std::size_t i = 0; i < n; ++i) img[i] = buffer[i] / 255.0;
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const unsigned v = (static_cast<unsigned>(buffer[2 * i]) << 8) | buffer[2 * i + 1];
      img[i] = v / 65535.0;
    }
  }
  return img;
}

void save_png(const PlanarImage& img, const std::filesystem::path& path, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) {
    throw InvalidInputError("save_png: bit depth must be 8 or 16");
  }
  require_finite(img, "save_png");
  const std::size_t n = img.size();
  std::vector<unsigned char> buffer(n * (bit_depth / 8));
  if (bit_depth == 8) {
    for (std::size_t i = 0; i < n; ++i) {
      buffer[i] = static_cast<unsigned char>(std::lround(std::clamp(img[i], 0.0, 1.0) * 255.0));
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = static_cast<unsigned>(std::lround(std::clamp(img[i], 0.0, 1.0) * 65535.0));
      buffer[2 * i] = static_cast<unsigned char>(v >> 8);
      buffer[2 * i + 1] = static_cast<unsigned char>(v & 0xFF);
    }
  }
  FilePtr file(std::fopen(path.string().c_str(), "wb"));
  if (!file) format_error(path, "cannot open for writing");
  PngErrorState state;
  if (!write_png_rows(file.get(), img.width(), img.height(), bit_depth, buffer, state)) {
    format_error(path, std::string("PNG write failed: ") + state.message);
  }
}

PlanarImage load_pfm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) format_error(path, "cannot open for reading");
  std::string magic;
  in >> magic;
  if (magic == "Pf") format_error(path, "expected 3-channel PFM, got grayscale 'Pf'");
  if (magic != "PF") format_error(path, "bad PFM magic");
  long long w = 0, h = 0;
  double scale = 0.0;
  if (!(in >> w >> h >> scale) || w < 1 || h < 1 || scale == 0.0 || !std::isfinite(scale)) {
    format_error(path, "corrupt PFM header");
  }
  in.get();  // single whitespace byte before the raster
  const bool little = scale < 0.0;
  const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3;
  std::vector<std::uint32_t> raw(count);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count * 4));
  if (static_cast<std::size_t>(in.gcount()) != count * 4) format_error(path, "truncated PFM raster");
  const bool swap = little != (std::endian::native == std::endian::little);

  PlanarImage img(static_cast<int>(h), static_cast<int>(w));
  for (long long row = 0; row < h; ++row) {
    const long long y = h - 1 - row;  // stored bottom to top
    for (long long x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        std::uint32_t bits = raw[(static_cast<std::size_t>(row) * w + x) * 3 + c];
        if (swap) bits = __builtin_bswap32(bits);
        img.at(static_cast<int>(y), static_cast<int>(x), c) = std::bit_cast<float>(bits);
      }
    }
  }
  return img;
}

void save_pfm(const PlanarImage& img, const std::filesystem::path& path) {
  if (img.empty()) throw InvalidInputError("save_pfm: empty image");
  std::ofstream out(path, std::ios::binary);
  if (!out) format_error(path, "cannot open for writing");
  out << "PF\n" << img.width() << ' ' << img.height() << "\n-1.0\n";
  const int h = img.height(), w = img.width();
  std::vector<std::uint32_t> raw(img.size());
  for (int row = 0; row < h; ++row) {
    const int y = h - 1 - row;
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        std::uint32_t bits = std::bit_cast<std::uint32_t>(static_cast<float>(img.at(y, x, c)));
        if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
        raw[(static_cast<std::size_t>(row) * w + x) * 3 + c] = bits;
      }
    }
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 4));
  if (!out) format_error(path, "write failed");
}

PlanarImage load_image(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") return load_png(path);
  if (ext == ".pfm") return load_pfm(path);
  format_error(path, "unknown image extension '" + ext + "'");
}

void save_image(const PlanarImage& img, const std::filesystem::path& path, int png_bit_depth) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") return save_png(img, path, png_bit_depth);
  if (ext == ".pfm") return save_pfm(img, path);
  format_error(path, "unknown image extension '" + ext + "'");
}

}  // namespace xyzcycle::data
