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

// Joint-dataset construction: per-dataset train/test splitting and the union
// of all splits into one training and one test manifest.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lttext/annotation.hpp"
#include "lttext/error.hpp"
#include "lttext/parallel.hpp"
#include "lttext/text.hpp"

namespace lttext {

class SplitPolicy {
 public:
  enum class Kind { KeepOriginal, Ratio, EnglishOnlyThenRatio };

  static SplitPolicy keep_original() { return SplitPolicy(Kind::KeepOriginal, 0.0); }
  static SplitPolicy ratio(double train_fraction) { return SplitPolicy(Kind::Ratio, train_fraction); }
  static SplitPolicy english_only_then_ratio(double train_fraction) {
    return SplitPolicy(Kind::EnglishOnlyThenRatio, train_fraction);
  }

  Kind kind() const { return kind_; }
  double train_fraction() const { return fraction_; }

  /// Orders images by a seeded hash instead of by id before cutting.
  std::optional<std::uint64_t> shuffle_seed() const { return seed_; }
  SplitPolicy with_shuffle_seed(std::optional<std::uint64_t> seed) const {
    SplitPolicy p = *this;
    p.seed_ = seed;
    return p;
  }

  std::string to_string() const {
    switch (kind_) {
      case Kind::KeepOriginal: return "keep_original";
      case Kind::Ratio: return "ratio";
      case Kind::EnglishOnlyThenRatio: return "english_only_then_ratio";
    }
    return "";
  }

  static std::optional<Kind> kind_from_string(std::string_view s) {
    if (s == "keep_original") return Kind::KeepOriginal;
    if (s == "ratio") return Kind::Ratio;
    if (s == "english_only_then_ratio") return Kind::EnglishOnlyThenRatio;
    return std::nullopt;
  }

 private:
  SplitPolicy(Kind k, double f) : kind_(k), fraction_(f) {
    if (k != Kind::KeepOriginal && !(f > 0.0 && f < 1.0)) {
      throw Error("train_fraction must lie in (0, 1)");
    }
  }

  Kind kind_;
  double fraction_;
  std::optional<std::uint64_t> seed_;
};

struct DatasetSplit {
  DatasetManifest train;
  DatasetManifest test;
};

/// floor(f·n); the epsilon absorbs products like 0.57·100 = 56.999….
inline std::size_t train_count(std::size_t n, double train_fraction) {
  return static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n) + 1e-9));
}

namespace detail {

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::vector<ImageAnnotation> ordered_images(std::vector<ImageAnnotation> images,
                                                   std::optional<std::uint64_t> seed) {
  if (!seed) {
    std::stable_sort(images.begin(), images.end(),
                     [](const auto& a, const auto& b) { return a.image_id < b.image_id; });
    return images;
  }
  std::vector<std::pair<std::uint64_t, ImageAnnotation>> keyed;
  keyed.reserve(images.size());
  for (auto& img : images) keyed.emplace_back(splitmix64(*seed ^ fnv1a(img.image_id)), std::move(img));
  std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first < b.first : a.second.image_id < b.second.image_id;
  });
  images.clear();
  for (auto& [k, img] : keyed) images.push_back(std::move(img));
  return images;
}

inline DatasetManifest sorted_copy(DatasetManifest m) {
  m.sort_images();
  return m;
}

}  // namespace detail

/// Images with at least one instance in Latin script (declared, or inferred
/// from an all-ASCII transcription).
inline DatasetManifest english_only_filter(const DatasetManifest& m) {
  DatasetManifest out;
  out.name = m.name;
  out.split = m.split;
  for (const auto& img : m.images) {
    const bool english = std::any_of(img.instances.begin(), img.instances.end(), [](const auto& inst) {
      return inst.script == Script::Latin ||
             (inst.transcription && text::is_basic_latin_text(*inst.transcription));
    });
    if (english) out.images.push_back(img);
  }
  return out;
}

/// Ratio policies sort images (by id, or by seeded hash), give the first
/// floor(f·N) to train and the rest to test; EmptySplit when a side is empty.
/// KeepOriginal routes the manifest by its declared split.
inline DatasetSplit split_dataset(const DatasetManifest& m, const SplitPolicy& policy) {
  DatasetSplit out;
  out.train.name = m.name;
  out.train.split = Split::Train;
  out.test.name = m.name;
  out.test.split = Split::Test;
  if (policy.kind() == SplitPolicy::Kind::KeepOriginal) {
    switch (m.split) {
      case Split::Train: out.train.images = m.images; break;
      case Split::Test: out.test.images = m.images; break;
      case Split::Unsplit:
        throw Error("dataset \"" + m.name + "\" has no declared split to keep");
    }
    out.train.sort_images();
    out.test.sort_images();
    return out;
  }
  std::vector<ImageAnnotation> images = detail::ordered_images(
      policy.kind() == SplitPolicy::Kind::EnglishOnlyThenRatio ? english_only_filter(m).images
                                                               : m.images,
      policy.shuffle_seed());
  const std::size_t n_train = train_count(images.size(), policy.train_fraction());
  if (n_train == 0 || n_train == images.size()) {
    throw EmptySplit("dataset \"" + m.name + "\" with " + std::to_string(images.size()) +
                     " image(s) leaves an empty side at fraction " +
                     std::to_string(policy.train_fraction()));
  }
  out.train.images.assign(std::make_move_iterator(images.begin()),
                          std::make_move_iterator(images.begin() + static_cast<std::ptrdiff_t>(n_train)));
  out.test.images.assign(std::make_move_iterator(images.begin() + static_cast<std::ptrdiff_t>(n_train)),
                         std::make_move_iterator(images.end()));
  out.train.sort_images();
  out.test.sort_images();
  return out;
}

// Merging --------------------------------------------------------------------------

struct PlanEntry {
  std::string name;
  SplitPolicy policy = SplitPolicy::keep_original();
  std::vector<DatasetManifest> manifests;
};

struct MergePlan {
  std::string name = "joint";
  std::vector<PlanEntry> datasets;
  bool require_at_least_one_instance = true;
};

struct Contribution {
  std::string dataset;
  std::string policy;
  std::size_t input_images = 0;   // before any filtering
  std::size_t train = 0;          // after the at-least-one-instance filter
  std::size_t test = 0;
  std::size_t dropped_empty = 0;  // train images removed for having no instances

  friend bool operator==(const Contribution&, const Contribution&) = default;
};

struct MergeReport {
  std::string name;
  std::vector<Contribution> rows;  // plan order
  std::size_t train_total = 0;
  std::size_t test_total = 0;
  std::size_t dropped_total = 0;
};

struct JointResult {
  DatasetManifest train;
  DatasetManifest test;
  MergeReport report;
};

namespace detail {

inline DatasetManifest concat(const PlanEntry& e) {
  DatasetManifest m;
  m.name = e.name;
  m.split = e.manifests.size() == 1 ? e.manifests.front().split : Split::Unsplit;
  std::set<std::string> seen;
  for (const auto& part : e.manifests) {
    for (const auto& img : part.images) {
      if (!seen.insert(img.image_id).second) {
        throw Error("dataset \"" + e.name + "\" repeats image_id \"" + img.image_id + "\"");
      }
      m.images.push_back(img);
    }
  }
  return m;
}

inline DatasetSplit split_entry(const PlanEntry& e) {
  if (e.policy.kind() != SplitPolicy::Kind::KeepOriginal) return split_dataset(concat(e), e.policy);
  DatasetSplit out;
  out.train.name = out.test.name = e.name;
  out.train.split = Split::Train;
  out.test.split = Split::Test;
  for (const auto& part : e.manifests) {
    DatasetSplit s = split_dataset(part, e.policy);
    for (auto& img : s.train.images) out.train.images.push_back(std::move(img));
    for (auto& img : s.test.images) out.test.images.push_back(std::move(img));
  }
  return out;
}

inline void namespace_into(std::vector<ImageAnnotation>& images, const std::string& dataset,
                           DatasetManifest& target) {
  for (auto& img : images) {
    img.image_id = dataset + "/" + img.image_id;
    if (img.source_dataset.empty()) img.source_dataset = dataset;
    target.images.push_back(std::move(img));
  }
}

}  // namespace detail

/// Unions every dataset's splits. Image ids become "<dataset>/<id>"; train
/// images without instances are dropped when the plan asks for it.
inline JointResult build_joint(const MergePlan& plan, unsigned threads = 1) {
  std::set<std::string> names;
  for (const auto& e : plan.datasets) {
    if (e.name.empty()) throw Error("plan entry without a dataset name");
    if (e.name.find('/') != std::string::npos) throw Error("dataset name may not contain '/'");
    if (!names.insert(e.name).second) throw Error("dataset \"" + e.name + "\" listed twice");
  }

  std::vector<DatasetSplit> splits(plan.datasets.size());
  parallel_for(plan.datasets.size(), threads,
               [&](std::size_t i) { splits[i] = detail::split_entry(plan.datasets[i]); });

  JointResult r;
  r.train.name = plan.name + "-train";
  r.train.split = Split::Train;
  r.test.name = plan.name + "-test";
  r.test.split = Split::Test;
  r.report.name = plan.name;

  for (std::size_t i = 0; i < plan.datasets.size(); ++i) {
    const PlanEntry& e = plan.datasets[i];
    Contribution c;
    c.dataset = e.name;
    c.policy = e.policy.to_string();
    for (const auto& m : e.manifests) c.input_images += m.images.size();
    auto& train = splits[i].train.images;
    if (plan.require_at_least_one_instance) {
      const auto before = train.size();
      std::erase_if(train, [](const ImageAnnotation& img) { return img.instances.empty(); });
      c.dropped_empty = before - train.size();
    }
    c.train = train.size();
    c.test = splits[i].test.images.size();
    detail::namespace_into(train, e.name, r.train);
    detail::namespace_into(splits[i].test.images, e.name, r.test);
    r.report.train_total += c.train;
    r.report.test_total += c.test;
    r.report.dropped_total += c.dropped_empty;
    r.report.rows.push_back(std::move(c));
  }

  r.train.sort_images();
  r.test.sort_images();
  for (const DatasetManifest* m : {&r.train, &r.test}) {
    for (std::size_t i = 1; i < m->images.size(); ++i) {
      if (m->images[i].image_id == m->images[i - 1].image_id) {
        throw DuplicateNamespacedId("duplicate image id \"" + m->images[i].image_id + "\"");
      }
    }
  }
  return r;
}

}  // namespace lttext
