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

// Long-tailed benchmark construction: detector-assisted filtering of
// undetected care instances, annotation cleaning, and near-duplicate image
// removal.

#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lttext/annotation.hpp"
#include "lttext/error.hpp"
#include "lttext/geometry.hpp"
#include "lttext/parallel.hpp"
#include "lttext/text.hpp"

namespace lttext {

// Detector-assisted filtering -----------------------------------------------------

/// Union of every detector's polygons for the image, in detector order.
inline std::vector<Polygon> joint_predict(std::span<const DetectionSet> detections,
                                          const std::string& image_id) {
  std::vector<Polygon> out;
  for (const DetectionSet& d : detections) {
    if (auto it = d.per_image.find(image_id); it != d.per_image.end()) {
      for (const auto& sp : it->second) out.push_back(sp.polygon);
    }
  }
  return out;
}

/// Highest IoU of `g` against any prediction; 0 when there are none.
inline double max_iou(std::span<const Polygon> predictions, const Polygon& g) {
  double best = 0.0;
  for (const Polygon& p : predictions) best = std::max(best, iou(g, p));
  return best;
}

struct FilterConfig {
  double iou_threshold = 0.5;

  void validate() const {
    if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
      throw Error("iou_threshold must lie in (0, 1]");
    }
  }
};

struct UndetectedInstance {
  std::size_t index = 0;  // position within the image's instance list
  double max_iou = 0.0;
  TextInstance instance;
};

struct FilterOutput {
  std::vector<std::string> images_with_undetected;  // ascending image_id
  std::map<std::string, std::vector<UndetectedInstance>> undetected;

  bool empty() const { return images_with_undetected.empty(); }

  std::size_t instance_count() const {
    std::size_t n = 0;
    for (const auto& [id, v] : undetected) n += v.size();
    return n;
  }
};

/// Keeps the care instances whose best IoU against the joint prediction set
/// is below the threshold; an image is listed when it keeps at least one.
inline FilterOutput filter_undetected(std::span<const DetectionSet> detections,
                                      const DatasetManifest& manifest, const FilterConfig& cfg,
                                      unsigned threads = 1) {
  cfg.validate();
  std::vector<const ImageAnnotation*> images;
  for (const auto& img : manifest.images) images.push_back(&img);
  std::stable_sort(images.begin(), images.end(),
                   [](const auto* a, const auto* b) { return a->image_id < b->image_id; });

  std::vector<std::vector<UndetectedInstance>> kept(images.size());
  parallel_for(images.size(), threads, [&](std::size_t i) {
    const ImageAnnotation& img = *images[i];
    const auto joint = joint_predict(detections, img.image_id);
    for (std::size_t k = 0; k < img.instances.size(); ++k) {
      const TextInstance& g = img.instances[k];
      if (!g.care) continue;
      const double u = max_iou(joint, g.polygon);
      if (u < cfg.iou_threshold) kept[i].push_back({k, u, g});
    }
  });

  FilterOutput out;
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (kept[i].empty()) continue;
    out.images_with_undetected.push_back(images[i]->image_id);
    out.undetected[images[i]->image_id] = std::move(kept[i]);
  }
  return out;
}

/// Manifest of the listed images where undetected instances stay care and
/// every other instance becomes don't-care.
inline DatasetManifest filtered_manifest(const DatasetManifest& source, const FilterOutput& out) {
  DatasetManifest m;
  m.name = source.name;
  m.split = source.split;
  for (const auto& img : source.images) {
    auto it = out.undetected.find(img.image_id);
    if (it == out.undetected.end()) continue;
    std::set<std::size_t> retained;
    for (const auto& u : it->second) retained.insert(u.index);
    ImageAnnotation copy = img;
    for (std::size_t k = 0; k < copy.instances.size(); ++k) {
      copy.instances[k].care = retained.contains(k);
    }
    m.images.push_back(std::move(copy));
  }
  m.sort_images();
  return m;
}

// Cleaning -------------------------------------------------------------------------

struct DemotedInstance {
  std::string image_id;
  std::size_t index = 0;
  std::string reason;
};

struct CleaningReport {
  std::size_t examined = 0;  // care instances inspected
  std::vector<DemotedInstance> demoted;
  Diagnostics diagnostics;
};

struct CleaningResult {
  DatasetManifest manifest;
  CleaningReport report;
};

/// Why a care instance fails the Latin-script rule, or empty when it passes.
/// Declared script wins; otherwise the transcription must be printable ASCII.
inline std::string non_latin_reason(const TextInstance& inst) {
  switch (inst.script) {
    case Script::NonLatin: return "script declared non-Latin";
    case Script::Mixed: return "script declared mixed";
    case Script::Latin: return {};
    case Script::Unknown: break;
  }
  if (inst.transcription && !text::is_basic_latin_text(*inst.transcription)) {
    return "transcription contains characters outside basic Latin";
  }
  return {};
}

/// Demotes care instances with non-Latin text to don't-care regions.
inline CleaningResult strip_non_latin(const DatasetManifest& m) {
  CleaningResult r{m, {}};
  for (auto& img : r.manifest.images) {
    for (std::size_t k = 0; k < img.instances.size(); ++k) {
      TextInstance& inst = img.instances[k];
      if (!inst.care) continue;
      ++r.report.examined;
      const std::string reason = non_latin_reason(inst);
      if (!reason.empty()) {
        inst.care = false;
        r.report.demoted.push_back({img.image_id, k, reason});
      } else if (inst.script == Script::Unknown && !inst.transcription) {
        detail::emit(&r.report.diagnostics, Severity::Warning, "unknown_script",
                     img.image_id + " instance " + std::to_string(k),
                     "no script or transcription; kept");
      }
    }
  }
  return r;
}

/// True when the trimmed transcription contains whitespace.
inline bool has_internal_space(std::string_view s) {
  const std::string_view t = text::trim(s);
  return t.find_first_of(" \t") != std::string_view::npos;
}

/// Demotes care instances that are not single words.
inline CleaningResult enforce_word_level(const DatasetManifest& m) {
  CleaningResult r{m, {}};
  for (auto& img : r.manifest.images) {
    for (std::size_t k = 0; k < img.instances.size(); ++k) {
      TextInstance& inst = img.instances[k];
      if (!inst.care) continue;
      ++r.report.examined;
      std::string reason;
      if (!inst.word_level) {
        reason = "annotated at line level";
      } else if (inst.transcription && has_internal_space(*inst.transcription)) {
        reason = "transcription contains a space";
      }
      if (!reason.empty()) {
        inst.care = false;
        r.report.demoted.push_back({img.image_id, k, reason});
      }
    }
  }
  return r;
}

// Near-duplicate removal -------------------------------------------------------------

using ImageHash = std::uint64_t;

struct HashedImage {
  std::string image_id;
  ImageHash hash = 0;
};

struct DedupConfig {
  double similarity_threshold = 0.95;
  bool exact = false;  // exhaustive pairwise comparison instead of blocking

  void validate() const {
    if (!(similarity_threshold > 0.0 && similarity_threshold <= 1.0)) {
      throw Error("similarity_threshold must lie in (0, 1]");
    }
  }
};

inline unsigned hamming(ImageHash a, ImageHash b) {
  return static_cast<unsigned>(std::popcount(a ^ b));
}

inline double hash_similarity(ImageHash a, ImageHash b) {
  return 1.0 - static_cast<double>(hamming(a, b)) / 64.0;
}

/// Largest Hamming distance whose similarity still exceeds the threshold;
/// -1 when no distance qualifies.
inline int max_duplicate_distance(double threshold) {
  int d = -1;
  for (int h = 0; h <= 64; ++h) {
    if (1.0 - h / 64.0 > threshold) d = h;
  }
  return d;
}

struct DuplicatePair {
  std::string first;   // lexicographically smaller id
  std::string second;
  unsigned distance = 0;
  double similarity = 0.0;

  friend bool operator==(const DuplicatePair&, const DuplicatePair&) = default;
};

struct DedupResult {
  std::vector<DuplicatePair> pairs;   // sorted by (first, second)
  std::vector<std::string> survivors; // sorted
  std::vector<std::string> removed;   // sorted
};

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

// Pairs within Hamming distance `d`. With d+1 disjoint bit blocks, two
// hashes differing in at most d bits agree exactly on at least one block,
// so bucketing by (block, value) finds every such pair.
inline std::set<std::pair<std::size_t, std::size_t>> blocked_candidates(
    const std::vector<HashedImage>& items, int d) {
  std::set<std::pair<std::size_t, std::size_t>> out;
  const int blocks = d + 1;
  for (int b = 0; b < blocks; ++b) {
    const int lo = 64 * b / blocks;
    const int hi = 64 * (b + 1) / blocks;
    const int width = hi - lo;
    const ImageHash mask = width >= 64 ? ~ImageHash{0} : ((ImageHash{1} << width) - 1);
    std::unordered_map<ImageHash, std::vector<std::size_t>> buckets;
    for (std::size_t i = 0; i < items.size(); ++i) {
      buckets[(items[i].hash >> lo) & mask].push_back(i);
    }
    for (const auto& [key, members] : buckets) {
      for (std::size_t x = 0; x < members.size(); ++x) {
        for (std::size_t y = x + 1; y < members.size(); ++y) {
          out.emplace(members[x], members[y]);
        }
      }
    }
  }
  return out;
}

}  // namespace detail

/// Groups near-duplicates (similarity above the threshold) into connected
/// components; the smallest image_id of each component survives.
inline DedupResult dedup_hashes(std::vector<HashedImage> items, const DedupConfig& cfg) {
  cfg.validate();
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    return a.image_id != b.image_id ? a.image_id < b.image_id : a.hash < b.hash;
  });
  const int d = max_duplicate_distance(cfg.similarity_threshold);
  std::set<std::pair<std::size_t, std::size_t>> candidates;
  if (d >= 0) {
    if (cfg.exact || d >= 63) {
      for (std::size_t i = 0; i < items.size(); ++i) {
        for (std::size_t j = i + 1; j < items.size(); ++j) candidates.emplace(i, j);
      }
    } else {
      candidates = detail::blocked_candidates(items, d);
    }
  }

  DedupResult r;
  detail::DisjointSets sets(items.size());
  for (const auto& [i, j] : candidates) {
    const unsigned h = hamming(items[i].hash, items[j].hash);
    if (static_cast<int>(h) > d) continue;
    sets.unite(i, j);
    r.pairs.push_back({items[i].image_id, items[j].image_id, h, hash_similarity(items[i].hash, items[j].hash)});
  }
  std::sort(r.pairs.begin(), r.pairs.end(), [](const auto& a, const auto& b) {
    return std::tie(a.first, a.second) < std::tie(b.first, b.second);
  });
  // Items are sorted by id, so each root (the minimum index) is the
  // component's smallest id.
  for (std::size_t i = 0; i < items.size(); ++i) {
    (sets.find(i) == i ? r.survivors : r.removed).push_back(items[i].image_id);
  }
  return r;
}

}  // namespace lttext
