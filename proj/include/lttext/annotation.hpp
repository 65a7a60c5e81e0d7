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

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lttext/error.hpp"
#include "lttext/geometry.hpp"

namespace lttext {

// Challenge taxonomy ---------------------------------------------------------

enum class ChallengeCategory : std::uint8_t {
  Blurred,
  Artistic,
  Glass,
  SingleChar,
  Distorted,
  Inverse,
  Delimited,
  Dense,
  Overlapped,
  Occluded,
  LowContrast,
  ComplexBackground,
  Others,
};

inline constexpr std::size_t kCategoryCount = 13;

inline constexpr std::array<ChallengeCategory, kCategoryCount> kAllCategories = {
    ChallengeCategory::Blurred,    ChallengeCategory::Artistic,
    ChallengeCategory::Glass,      ChallengeCategory::SingleChar,
    ChallengeCategory::Distorted,  ChallengeCategory::Inverse,
    ChallengeCategory::Delimited,  ChallengeCategory::Dense,
    ChallengeCategory::Overlapped, ChallengeCategory::Occluded,
    ChallengeCategory::LowContrast, ChallengeCategory::ComplexBackground,
    ChallengeCategory::Others,
};

/// Column order of the per-category comparison table.
inline constexpr std::array<ChallengeCategory, kCategoryCount> kTableOrder = {
    ChallengeCategory::Blurred,    ChallengeCategory::Artistic,
    ChallengeCategory::Glass,      ChallengeCategory::SingleChar,
    ChallengeCategory::Inverse,    ChallengeCategory::Distorted,
    ChallengeCategory::Delimited,  ChallengeCategory::Dense,
    ChallengeCategory::Overlapped, ChallengeCategory::Occluded,
    ChallengeCategory::LowContrast, ChallengeCategory::ComplexBackground,
    ChallengeCategory::Others,
};

enum class CategoryGroup { IntraInstance, InterInstance, Background, Other };

constexpr CategoryGroup group_of(ChallengeCategory c) {
  switch (c) {
    case ChallengeCategory::Dense:
    case ChallengeCategory::Overlapped:
      return CategoryGroup::InterInstance;
    case ChallengeCategory::Occluded:
    case ChallengeCategory::LowContrast:
    case ChallengeCategory::ComplexBackground:
      return CategoryGroup::Background;
    case ChallengeCategory::Others:
      return CategoryGroup::Other;
    default:
      return CategoryGroup::IntraInstance;
  }
}

inline const char* to_string(CategoryGroup g) {
  switch (g) {
    case CategoryGroup::IntraInstance: return "Intra-instance";
    case CategoryGroup::InterInstance: return "Inter-instance";
    case CategoryGroup::Background: return "Background";
    case CategoryGroup::Other: return "Others";
  }
  return "";
}

/// Canonical lower_snake tag used in files, e.g. "low_contrast".
inline const char* to_string(ChallengeCategory c) {
  static constexpr std::array<const char*, kCategoryCount> kTags = {
      "blurred",   "artistic", "glass",      "single_char",  "distorted",
      "inverse",   "delimited", "dense",     "overlapped",   "occluded",
      "low_contrast", "complex_background", "others"};
  return kTags[static_cast<std::size_t>(c)];
}

/// Column heading, e.g. "Low-Contrast".
inline const char* display_name(ChallengeCategory c) {
  static constexpr std::array<const char*, kCategoryCount> kNames = {
      "Blurred",   "Artistic",  "Glass",  "Single-Char", "Distorted",
      "Inverse",   "Delimited", "Dense",  "Overlapped",  "Occluded",
      "Low-Contrast", "Complex-BG", "Others"};
  return kNames[static_cast<std::size_t>(c)];
}

inline std::optional<ChallengeCategory> category_from_string(std::string_view tag) {
  for (ChallengeCategory c : kAllCategories) {
    if (tag == to_string(c)) return c;
  }
  return std::nullopt;
}

/// Small bit set of challenge categories; iterates in enum order.
class CategorySet {
 public:
  CategorySet() = default;
  CategorySet(std::initializer_list<ChallengeCategory> cs) {
    for (ChallengeCategory c : cs) insert(c);
  }

  void insert(ChallengeCategory c) { bits_ |= bit(c); }
  void erase(ChallengeCategory c) { bits_ &= static_cast<std::uint16_t>(~bit(c)); }
  bool contains(ChallengeCategory c) const { return (bits_ & bit(c)) != 0; }
  bool empty() const { return bits_ == 0; }
  std::size_t size() const { return static_cast<std::size_t>(__builtin_popcount(bits_)); }

  std::vector<ChallengeCategory> to_vector() const {
    std::vector<ChallengeCategory> out;
    for (ChallengeCategory c : kAllCategories) {
      if (contains(c)) out.push_back(c);
    }
    return out;
  }

  friend bool operator==(const CategorySet&, const CategorySet&) = default;

 private:
  static std::uint16_t bit(ChallengeCategory c) {
    return static_cast<std::uint16_t>(1u << static_cast<unsigned>(c));
  }
  std::uint16_t bits_ = 0;
};

// Annotations ----------------------------------------------------------------

enum class Script { Latin, NonLatin, Mixed, Unknown };

inline const char* to_string(Script s) {
  switch (s) {
    case Script::Latin: return "latin";
    case Script::NonLatin: return "non_latin";
    case Script::Mixed: return "mixed";
    case Script::Unknown: return "unknown";
  }
  return "unknown";
}

inline std::optional<Script> script_from_string(std::string_view s) {
  if (s == "latin") return Script::Latin;
  if (s == "non_latin") return Script::NonLatin;
  if (s == "mixed") return Script::Mixed;
  if (s == "unknown") return Script::Unknown;
  return std::nullopt;
}

enum class Split { Train, Test, Unsplit };

inline const char* to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Test: return "test";
    case Split::Unsplit: return "unsplit";
  }
  return "unsplit";
}

inline std::optional<Split> split_from_string(std::string_view s) {
  if (s == "train") return Split::Train;
  if (s == "test") return Split::Test;
  if (s == "unsplit") return Split::Unsplit;
  return std::nullopt;
}

/// One ground-truth text region. Don't-care regions carry no transcription
/// when read from "###"-style sources.
struct TextInstance {
  Polygon polygon;
  bool care = true;
  std::optional<std::string> transcription;
  CategorySet categories;
  bool word_level = true;
  Script script = Script::Unknown;

  friend bool operator==(const TextInstance&, const TextInstance&) = default;
};

struct ImageAnnotation {
  std::string image_id;
  std::string file_name;
  int width = 0;
  int height = 0;
  std::string source_dataset;
  std::vector<TextInstance> instances;

  friend bool operator==(const ImageAnnotation&, const ImageAnnotation&) = default;
};

struct DatasetManifest {
  std::string name;
  Split split = Split::Unsplit;
  std::vector<ImageAnnotation> images;

  const ImageAnnotation* find(std::string_view image_id) const {
    for (const auto& img : images) {
      if (img.image_id == image_id) return &img;
    }
    return nullptr;
  }

  void sort_images() {
    std::stable_sort(images.begin(), images.end(),
                     [](const auto& a, const auto& b) { return a.image_id < b.image_id; });
  }

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

struct ScoredPolygon {
  Polygon polygon;
  std::optional<double> score;

  friend bool operator==(const ScoredPolygon&, const ScoredPolygon&) = default;
};

/// One detector's predictions keyed by image id.
struct DetectionSet {
  std::string detector_name;
  std::map<std::string, std::vector<ScoredPolygon>> per_image;

  std::vector<Polygon> polygons_for(const std::string& image_id) const {
    std::vector<Polygon> out;
    if (auto it = per_image.find(image_id); it != per_image.end()) {
      out.reserve(it->second.size());
      for (const auto& sp : it->second) out.push_back(sp.polygon);
    }
    return out;
  }

  friend bool operator==(const DetectionSet&, const DetectionSet&) = default;
};

// Validation -----------------------------------------------------------------

/// Fraction of the image extent a vertex may overshoot before a warning.
inline constexpr double kOutOfBoundsTolerance = 0.05;

/// Reports duplicate ids, invalid polygons, out-of-bounds vertices and empty
/// images. Never throws.
inline Diagnostics validate_manifest(const DatasetManifest& m) {
  Diagnostics out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < m.images.size(); ++i) {
    const ImageAnnotation& img = m.images[i];
    const std::string where = img.image_id.empty() ? "images[" + std::to_string(i) + "]"
                                                   : img.image_id;
    if (!seen.insert(img.image_id).second) {
      detail::emit(&out, Severity::Error, "duplicate_id", where, "duplicate image_id");
    }
    if (img.width <= 0 || img.height <= 0) {
      detail::emit(&out, Severity::Error, "bad_dimensions", where,
                   "width and height must be positive");
    }
    if (img.instances.empty()) {
      detail::emit(&out, Severity::Warning, "empty_image", where, "image has no instances");
    }
    const double lo_x = -kOutOfBoundsTolerance * img.width;
    const double hi_x = (1.0 + kOutOfBoundsTolerance) * img.width;
    const double lo_y = -kOutOfBoundsTolerance * img.height;
    const double hi_y = (1.0 + kOutOfBoundsTolerance) * img.height;
    for (std::size_t k = 0; k < img.instances.size(); ++k) {
      const Polygon& poly = img.instances[k].polygon;
      const std::string at = where + " instance " + std::to_string(k);
      switch (poly.status()) {
        case PolygonStatus::Degenerate:
          detail::emit(&out, Severity::Error, "degenerate_polygon", at,
                       "polygon has fewer than 3 distinct vertices or zero area");
          continue;
        case PolygonStatus::SelfIntersecting:
          detail::emit(&out, Severity::Error, "self_intersecting_polygon", at,
                       "polygon edges intersect");
          continue;
        case PolygonStatus::Valid:
          break;
      }
      if (img.width > 0 && img.height > 0) {
        const Box& b = poly.bounds();
        if (b.min_x < lo_x || b.max_x > hi_x || b.min_y < lo_y || b.max_y > hi_y) {
          detail::emit(&out, Severity::Warning, "out_of_bounds", at,
                       "vertex lies more than 5% outside the image");
        }
      }
    }
  }
  return out;
}

// Statistics -----------------------------------------------------------------

struct CategoryCount {
  std::size_t images = 0;     // images with at least one care instance of the category
  std::size_t instances = 0;  // care instances carrying the category

  friend bool operator==(const CategoryCount&, const CategoryCount&) = default;
};

struct StatsReport {
  std::size_t images = 0;
  std::size_t care_instances = 0;
  std::size_t dontcare_instances = 0;
  std::size_t attributes = 0;  // Σ |categories| over care instances
  std::array<CategoryCount, kCategoryCount> per_category{};

  const CategoryCount& operator[](ChallengeCategory c) const {
    return per_category[static_cast<std::size_t>(c)];
  }

  /// Mean challenge attributes per care instance; 0 when there are none.
  double mean_attributes() const {
    return care_instances == 0 ? 0.0
                               : static_cast<double>(attributes) /
                                     static_cast<double>(care_instances);
  }

  StatsReport& operator+=(const StatsReport& o) {
    images += o.images;
    care_instances += o.care_instances;
    dontcare_instances += o.dontcare_instances;
    attributes += o.attributes;
    for (std::size_t i = 0; i < kCategoryCount; ++i) {
      per_category[i].images += o.per_category[i].images;
      per_category[i].instances += o.per_category[i].instances;
    }
    return *this;
  }

  friend StatsReport operator+(StatsReport a, const StatsReport& b) { return a += b; }
  friend bool operator==(const StatsReport&, const StatsReport&) = default;
};

inline StatsReport dataset_stats(const DatasetManifest& m) {
  StatsReport r;
  r.images = m.images.size();
  for (const auto& img : m.images) {
    std::array<bool, kCategoryCount> present{};
    for (const auto& inst : img.instances) {
      if (!inst.care) {
        ++r.dontcare_instances;
        continue;
      }
      ++r.care_instances;
      r.attributes += inst.categories.size();
      for (ChallengeCategory c : inst.categories.to_vector()) {
        const auto i = static_cast<std::size_t>(c);
        ++r.per_category[i].instances;
        present[i] = true;
      }
    }
    for (std::size_t i = 0; i < kCategoryCount; ++i) {
      if (present[i]) ++r.per_category[i].images;
    }
  }
  return r;
}

}  // namespace lttext
