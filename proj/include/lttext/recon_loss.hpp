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

// Reference kernel for the pixel-level balanced reconstruction loss
//
//   L = Σ_ij  α·[g_ij > T]·‖I_ij − R_ij‖² + (1−α)·[g_ij ≤ T]·‖I_ij − R_ij‖²
//
// where g is the guidance map, ‖·‖² sums squared differences over channels,
// and the pixel sum is unnormalized unless LossConfig::normalize is set.
// Sums use row-major pairwise reduction so results are bit-stable.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lttext/error.hpp"
#include "lttext/image.hpp"

namespace lttext {

/// H×W×C values, row-major with interleaved channels.
class ImageTensor {
 public:
  ImageTensor(std::size_t height, std::size_t width, std::size_t channels, std::vector<double> values)
      : height_(height), width_(width), channels_(channels), values_(std::move(values)) {
    if (height_ == 0 || width_ == 0 || channels_ == 0) {
      throw DimensionMismatch("tensor dimensions must be positive");
    }
    if (values_.size() != height_ * width_ * channels_) {
      throw DimensionMismatch("tensor holds " + std::to_string(values_.size()) +
                              " values, expected " + std::to_string(height_ * width_ * channels_));
    }
    for (double v : values_) {
      if (!std::isfinite(v)) throw Error("tensor value is not finite");
    }
  }

  ImageTensor(std::size_t height, std::size_t width, std::size_t channels, double fill)
      : ImageTensor(height, width, channels, std::vector<double>(height * width * channels, fill)) {}

  static ImageTensor from_image(const Image& img) {
    return ImageTensor(static_cast<std::size_t>(img.height), static_cast<std::size_t>(img.width),
                       static_cast<std::size_t>(img.channels), img.values);
  }

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t channels() const { return channels_; }
  std::span<const double> values() const { return values_; }

  double at(std::size_t i, std::size_t j, std::size_t c = 0) const {
    return values_[(i * width_ + j) * channels_ + c];
  }
  void set(std::size_t i, std::size_t j, std::size_t c, double v) {
    if (!std::isfinite(v)) throw Error("tensor value is not finite");
    values_[(i * width_ + j) * channels_ + c] = v;
  }

 private:
  std::size_t height_;
  std::size_t width_;
  std::size_t channels_;
  std::vector<double> values_;
};

/// Per-pixel guidance (e.g. an attention map); any finite values.
class GuidanceMap {
 public:
  GuidanceMap(std::size_t height, std::size_t width, std::vector<double> values)
      : height_(height), width_(width), values_(std::move(values)) {
    if (values_.size() != height_ * width_) throw DimensionMismatch("guidance map size mismatch");
    for (double v : values_) {
      if (!std::isfinite(v)) throw Error("guidance value is not finite");
    }
  }

  /// Single-channel image; multi-channel input is reduced to luma.
  static GuidanceMap from_image(const Image& img) {
    const Image gray = to_gray(img);
    return GuidanceMap(static_cast<std::size_t>(gray.height), static_cast<std::size_t>(gray.width),
                       gray.values);
  }

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  double at(std::size_t i, std::size_t j) const { return values_[i * width_ + j]; }

 private:
  std::size_t height_;
  std::size_t width_;
  std::vector<double> values_;
};

struct LossConfig {
  double alpha = 0.9;      // text-region weight; background gets 1 − alpha
  double threshold = 0.1;  // guidance > threshold marks text
  bool normalize = false;  // divide by H·W·C

  void validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error("alpha must lie in [0, 1]");
    if (!std::isfinite(threshold)) throw Error("threshold must be finite");
  }
};

/// 1 where guidance > threshold, else 0; row-major H×W.
struct BinaryMask {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> cells;

  bool at(std::size_t i, std::size_t j) const { return cells[i * width + j] != 0; }
};

inline BinaryMask binarize_mask(const GuidanceMap& mg, double threshold) {
  BinaryMask m{mg.height(), mg.width(), std::vector<std::uint8_t>(mg.height() * mg.width())};
  for (std::size_t i = 0; i < mg.height(); ++i) {
    for (std::size_t j = 0; j < mg.width(); ++j) m.cells[i * mg.width() + j] = mg.at(i, j) > threshold;
  }
  return m;
}

struct LossTerms {
  double text_term = 0.0;        // α-weighted, pixels with guidance > T
  double background_term = 0.0;  // (1−α)-weighted, pixels with guidance ≤ T

  double total() const { return text_term + background_term; }
};

namespace detail {

/// Pairwise (cascade) summation.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline void check_dims(const ImageTensor& a, const ImageTensor& b, const GuidanceMap& mg) {
  if (a.height() != b.height() || a.width() != b.width() || a.channels() != b.channels()) {
    throw DimensionMismatch("image and reconstruction differ in shape");
  }
  if (mg.height() != a.height() || mg.width() != a.width()) {
    throw DimensionMismatch("guidance map does not match the image size");
  }
}

inline double pixel_l2(const ImageTensor& a, const ImageTensor& b, std::size_t i, std::size_t j) {
  double s = 0.0;
  for (std::size_t c = 0; c < a.channels(); ++c) {
    const double d = a.at(i, j, c) - b.at(i, j, c);
    s += d * d;
  }
  return s;
}

inline double normalizer(const ImageTensor& a, const LossConfig& cfg) {
  return cfg.normalize ? static_cast<double>(a.height() * a.width() * a.channels()) : 1.0;
}

}  // namespace detail

inline double balanced_reconstruction_loss(const ImageTensor& image, const ImageTensor& recon,
                                           const GuidanceMap& mg, const LossConfig& cfg) {
  cfg.validate();
  detail::check_dims(image, recon, mg);
  std::vector<double> per_pixel;
  per_pixel.reserve(image.height() * image.width());
  for (std::size_t i = 0; i < image.height(); ++i) {
    for (std::size_t j = 0; j < image.width(); ++j) {
      const double w = mg.at(i, j) > cfg.threshold ? cfg.alpha : 1.0 - cfg.alpha;
      per_pixel.push_back(w * detail::pixel_l2(image, recon, i, j));
    }
  }
  return detail::pairwise_sum(per_pixel) / detail::normalizer(image, cfg);
}

/// The two weighted summands, reduced separately.
inline LossTerms loss_decomposition(const ImageTensor& image, const ImageTensor& recon,
                                    const GuidanceMap& mg, const LossConfig& cfg) {
  cfg.validate();
  detail::check_dims(image, recon, mg);
  const BinaryMask mask = binarize_mask(mg, cfg.threshold);
  std::vector<double> text;
  std::vector<double> background;
  for (std::size_t i = 0; i < image.height(); ++i) {
    for (std::size_t j = 0; j < image.width(); ++j) {
      const double l2 = detail::pixel_l2(image, recon, i, j);
      (mask.at(i, j) ? text : background).push_back(l2);
    }
  }
  const double norm = detail::normalizer(image, cfg);
  return {cfg.alpha * detail::pairwise_sum(text) / norm,
          (1.0 - cfg.alpha) * detail::pairwise_sum(background) / norm};
}

}  // namespace lttext
