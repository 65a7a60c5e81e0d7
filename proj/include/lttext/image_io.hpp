// Copyright 2026 The lttext Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// PNG (libpng) and netpbm (P2/P3/P5/P6) decoding into normalized rasters.
// Requires linking libpng.

#pragma once

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <span>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <optional>
#include <vector>

#include "lttext/benchmark.hpp"
#include "lttext/error.hpp"
#include "lttext/formats.hpp"
#include "lttext/image.hpp"
#include "lttext/parallel.hpp"

namespace lttext {

namespace detail {

inline Image decode_png(std::string_view bytes, const std::string& name) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_memory(&png, bytes.data(), bytes.size()) == 0) {
    throw UndecodableImage(name + ": " + png.message);
  }
  if (static_cast<std::uint64_t>(png.width) * png.height > (std::uint64_t{1} << 28)) {
    png_image_free(&png);
    throw UndecodableImage(name + ": image too large");
  }
  const bool gray = (png.format & PNG_FORMAT_FLAG_COLOR) == 0;
  png.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  const int channels = gray ? 1 : 3;
  std::vector<png_byte> buf(PNG_IMAGE_SIZE(png));
  if (png_image_finish_read(&png, nullptr, buf.data(), 0, nullptr) == 0) {
    const std::string msg = png.message;
    png_image_free(&png);
    throw UndecodableImage(name + ": " + msg);
  }
  Image img(static_cast<int>(png.width), static_cast<int>(png.height), channels);
  for (std::size_t i = 0; i < buf.size() && i < img.values.size(); ++i) {
    img.values[i] = buf[i] / 255.0;
  }
  return img;
}

class PnmReader {
 public:
  PnmReader(std::string_view bytes, std::string name) : bytes_(bytes), name_(std::move(name)) {}

  Image read() {
    if (bytes_.size() < 2 || bytes_[0] != 'P') fail("not a netpbm file");
    const char kind = bytes_[1];
    pos_ = 2;
    int channels = 0;
    bool ascii = false;
    switch (kind) {
      case '2': channels = 1; ascii = true; break;
      case '3': channels = 3; ascii = true; break;
      case '5': channels = 1; break;
      case '6': channels = 3; break;
      default: fail("unsupported netpbm variant");
    }
    const long long w = header_int();
    const long long h = header_int();
    const long long maxval = header_int();
    if (w <= 0 || h <= 0 || w > 1 << 16 || h > 1 << 16) fail("bad dimensions");
    if (maxval <= 0 || maxval > 65535) fail("bad maxval");
    Image img(static_cast<int>(w), static_cast<int>(h), channels);
    const double scale = 1.0 / static_cast<double>(maxval);
    if (ascii) {
      for (double& v : img.values) {
        const long long s = header_int();
        if (s > maxval) fail("sample exceeds maxval");
        v = static_cast<double>(s) * scale;
      }
      return img;
    }
    ++pos_;  // single whitespace after maxval
    const std::size_t bytes_per = maxval < 256 ? 1 : 2;
    if (bytes_.size() < pos_ || bytes_.size() - pos_ < img.values.size() * bytes_per) {
      fail("truncated pixel data");
    }
    for (std::size_t i = 0; i < img.values.size(); ++i) {
      unsigned s = static_cast<unsigned char>(bytes_[pos_ + i * bytes_per]);
      if (bytes_per == 2) s = (s << 8) | static_cast<unsigned char>(bytes_[pos_ + i * 2 + 1]);
      if (s > maxval) fail("sample exceeds maxval");
      img.values[i] = s * scale;
    }
    return img;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw UndecodableImage(name_ + ": " + what); }

  long long header_int() {
    while (pos_ < bytes_.size()) {
      const auto c = static_cast<unsigned char>(bytes_[pos_]);
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
    long long v = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > (1LL << 32)) fail("number too large");
      ++pos_;
      ++digits;
    }
    if (digits == 0) fail("expected a number");
    return v;
  }

  std::string_view bytes_;
  std::string name_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Decodes PNG or netpbm bytes; throws UndecodableImage.
inline Image decode_image(std::string_view bytes, const std::string& name = "image") {
  static constexpr std::string_view kPngMagic = "\x89PNG";
  if (bytes.starts_with(kPngMagic)) return detail::decode_png(bytes, name);
  if (bytes.size() >= 2 && bytes[0] == 'P') return detail::PnmReader(bytes, name).read();
  throw UndecodableImage(name + ": unrecognized image format");
}

inline Image load_image(const std::filesystem::path& path) {
  std::string bytes;
  try {
    bytes = read_file(path);
  } catch (const IoError& e) {
    throw UndecodableImage(e.what());
  }
  return decode_image(bytes, path.string());
}

/// Binary PGM (1 channel) or PPM (3 channels), 8-bit.
inline std::string encode_pnm(const Image& img) {
  if (img.channels != 1 && img.channels != 3) throw DimensionMismatch("PNM needs 1 or 3 channels");
  std::string out = std::string(img.channels == 1 ? "P5" : "P6") + "\n" +
                    std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.reserve(out.size() + img.values.size());
  for (double v : img.values) {
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0))));
  }
  return out;
}

/// 8-bit gray or RGB PNG.
inline void write_png(const std::filesystem::path& path, const Image& img) {
  if (img.channels != 1 && img.channels != 3) throw DimensionMismatch("PNG needs 1 or 3 channels");
  std::vector<png_byte> buf(img.values.size());
  for (std::size_t i = 0; i < buf.size(); ++i) {
    buf[i] = static_cast<png_byte>(std::lround(std::clamp(img.values[i], 0.0, 1.0) * 255.0));
  }
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(img.width);
  png.height = static_cast<png_uint_32>(img.height);
  png.format = img.channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  if (png_image_write_to_file(&png, path.string().c_str(), 0, buf.data(), 0, nullptr) == 0) {
    throw IoError("cannot write " + path.string() + ": " + png.message);
  }
}

/// dHash of every decodable file, keyed by file name; undecodable files
/// are skipped with an "undecodable_image" warning. Output is sorted by id.
inline std::vector<HashedImage> hash_image_files(std::span<const std::filesystem::path> paths,
                                                 unsigned threads = 1, Diagnostics* diags = nullptr) {
  std::vector<std::optional<ImageHash>> hashes(paths.size());
  std::vector<std::string> errors(paths.size());
  parallel_for(paths.size(), threads, [&](std::size_t i) {
    try {
      hashes[i] = difference_hash(load_image(paths[i]));
    } catch (const UndecodableImage& e) {
      errors[i] = e.what();
    }
  });
  std::vector<HashedImage> out;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (hashes[i]) {
      out.push_back({paths[i].filename().string(), *hashes[i]});
    } else {
      detail::emit(diags, Severity::Warning, "undecodable_image", paths[i].string(), errors[i]);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.image_id < b.image_id; });
  return out;
}

}  // namespace lttext
