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

// ICDAR-style detection evaluation.
//
// Per image, predictions mostly covered by a don't-care region are removed
// from evaluation; the remaining predictions are matched one-to-one against
// care regions greedily by descending IoU. Counts are summed over images
// (micro aggregation) before precision, recall and F-measure are computed.
//
// Evaluation modes re-label ground truth before matching:
//   Norm         annotations as given;
//   Hard         only care regions carrying at least one challenge category;
//   Category(c)  only care regions carrying category c.

#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lttext/annotation.hpp"
#include "lttext/error.hpp"
#include "lttext/geometry.hpp"
#include "lttext/parallel.hpp"

namespace lttext {

class EvalMode {
 public:
  enum class Kind { Norm, Hard, Category };

  constexpr EvalMode() = default;
  static constexpr EvalMode norm() { return EvalMode(Kind::Norm, ChallengeCategory::Blurred); }
  static constexpr EvalMode hard() { return EvalMode(Kind::Hard, ChallengeCategory::Blurred); }
  static constexpr EvalMode category(ChallengeCategory c) { return EvalMode(Kind::Category, c); }

  constexpr Kind kind() const { return kind_; }
  /// Meaningful only for Kind::Category.
  constexpr ChallengeCategory target() const { return category_; }

  /// "norm", "hard" or "category:<tag>".
  std::string to_string() const {
    switch (kind_) {
      case Kind::Norm: return "norm";
      case Kind::Hard: return "hard";
      case Kind::Category: return std::string("category:") + lttext::to_string(category_);
    }
    return "norm";
  }

  static std::optional<EvalMode> parse(std::string_view s) {
    if (s == "norm") return norm();
    if (s == "hard") return hard();
    constexpr std::string_view kPrefix = "category:";
    if (s.starts_with(kPrefix)) {
      if (auto c = category_from_string(s.substr(kPrefix.size()))) return category(*c);
    }
    return std::nullopt;
  }

  /// Care flag of `inst` under this mode.
  bool is_care(const TextInstance& inst) const {
    switch (kind_) {
      case Kind::Norm: return inst.care;
      case Kind::Hard: return inst.care && !inst.categories.empty();
      case Kind::Category: return inst.care && inst.categories.contains(category_);
    }
    return inst.care;
  }

  friend bool operator==(const EvalMode& a, const EvalMode& b) {
    return a.kind_ == b.kind_ && (a.kind_ != Kind::Category || a.category_ == b.category_);
  }

 private:
  constexpr EvalMode(Kind k, ChallengeCategory c) : kind_(k), category_(c) {}

  Kind kind_ = Kind::Norm;
  ChallengeCategory category_ = ChallengeCategory::Blurred;
};

struct EvalConfig {
  double iou_threshold = 0.5;
  double dontcare_overlap_threshold = 0.5;
  EvalMode mode = EvalMode::norm();

  void validate() const {
    if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
      throw Error("iou_threshold must lie in (0, 1]");
    }
    if (!(dontcare_overlap_threshold > 0.0 && dontcare_overlap_threshold <= 1.0)) {
      throw Error("dontcare_overlap_threshold must lie in (0, 1]");
    }
  }
};

inline ImageAnnotation relabel_for_mode(const ImageAnnotation& gt, EvalMode mode) {
  ImageAnnotation out = gt;
  for (auto& inst : out.instances) inst.care = mode.is_care(inst);
  return out;
}

inline DatasetManifest relabel_for_mode(const DatasetManifest& m, EvalMode mode) {
  DatasetManifest out = m;
  for (auto& img : out.images) {
    for (auto& inst : img.instances) inst.care = mode.is_care(inst);
  }
  return out;
}

// Matching ---------------------------------------------------------------------

struct MatchCounts {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;

  MatchCounts& operator+=(const MatchCounts& o) {
    true_positives += o.true_positives;
    false_positives += o.false_positives;
    false_negatives += o.false_negatives;
    return *this;
  }
  friend MatchCounts operator+(MatchCounts a, const MatchCounts& b) { return a += b; }
  friend bool operator==(const MatchCounts&, const MatchCounts&) = default;
};

struct Pairing {
  std::size_t gt_index = 0;
  std::size_t pred_index = 0;
  double iou = 0.0;

  friend bool operator==(const Pairing&, const Pairing&) = default;
};

struct MatchResult {
  MatchCounts counts;
  std::vector<Pairing> pairs;              // in match order
  std::vector<std::size_t> suppressed;     // predictions absorbed by don't-care regions
  std::vector<std::size_t> unmatched_predictions;
  std::vector<std::size_t> unmatched_gt;   // care regions only
};

/// Matches one image's predictions against its ground truth under cfg.mode.
inline MatchResult match_image(const ImageAnnotation& gt, std::span<const Polygon> preds,
                               const EvalConfig& cfg) {
  MatchResult result;
  const std::size_t n_gt = gt.instances.size();
  std::vector<bool> care(n_gt);
  for (std::size_t g = 0; g < n_gt; ++g) care[g] = cfg.mode.is_care(gt.instances[g]);

  std::vector<bool> active(preds.size(), true);
  for (std::size_t p = 0; p < preds.size(); ++p) {
    for (std::size_t g = 0; g < n_gt; ++g) {
      if (care[g]) continue;
      if (intersection_over_first(preds[p], gt.instances[g].polygon) >=
          cfg.dontcare_overlap_threshold) {
        active[p] = false;
        result.suppressed.push_back(p);
        break;
      }
    }
  }

  std::vector<Pairing> candidates;
  for (std::size_t g = 0; g < n_gt; ++g) {
    if (!care[g]) continue;
    for (std::size_t p = 0; p < preds.size(); ++p) {
      if (!active[p]) continue;
      const double v = iou(gt.instances[g].polygon, preds[p]);
      if (v >= cfg.iou_threshold) candidates.push_back({g, p, v});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Pairing& a, const Pairing& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    if (a.gt_index != b.gt_index) return a.gt_index < b.gt_index;
    return a.pred_index < b.pred_index;
  });

  std::vector<bool> gt_used(n_gt, false);
  std::vector<bool> pred_used(preds.size(), false);
  for (const Pairing& c : candidates) {
    if (gt_used[c.gt_index] || pred_used[c.pred_index]) continue;
    gt_used[c.gt_index] = true;
    pred_used[c.pred_index] = true;
    result.pairs.push_back(c);
  }

  for (std::size_t p = 0; p < preds.size(); ++p) {
    if (active[p] && !pred_used[p]) result.unmatched_predictions.push_back(p);
  }
  for (std::size_t g = 0; g < n_gt; ++g) {
    if (care[g] && !gt_used[g]) result.unmatched_gt.push_back(g);
  }
  result.counts.true_positives = result.pairs.size();
  result.counts.false_positives = result.unmatched_predictions.size();
  result.counts.false_negatives = result.unmatched_gt.size();
  return result;
}

// Scores -----------------------------------------------------------------------

struct Scores {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;

  friend bool operator==(const Scores&, const Scores&) = default;
};

/// 0/0 ratios are reported as 0.
inline Scores scores_from(const MatchCounts& c) {
  const auto tp = static_cast<double>(c.true_positives);
  const std::size_t pd = c.true_positives + c.false_positives;
  const std::size_t rd = c.true_positives + c.false_negatives;
  Scores s;
  s.precision = pd == 0 ? 0.0 : tp / static_cast<double>(pd);
  s.recall = rd == 0 ? 0.0 : tp / static_cast<double>(rd);
  const double sum = s.precision + s.recall;
  s.f_measure = sum > 0.0 ? 2.0 * s.precision * s.recall / sum : 0.0;
  return s;
}

struct CategoryScore {
  MatchCounts counts;
  Scores scores;

  /// No care region of the category exists: the score is undefined.
  bool vacuous() const { return counts.true_positives + counts.false_negatives == 0; }

  friend bool operator==(const CategoryScore&, const CategoryScore&) = default;
};

struct ImageScore {
  std::string image_id;
  MatchCounts counts;

  friend bool operator==(const ImageScore&, const ImageScore&) = default;
};

struct EvalReport {
  std::string detector;
  EvalConfig config;
  std::size_t images = 0;
  MatchCounts counts;
  Scores scores;
  std::optional<std::map<ChallengeCategory, CategoryScore>> per_category;
  std::optional<std::vector<ImageScore>> per_image;
};

struct EvalOptions {
  bool per_category = false;
  bool per_image = false;
  unsigned threads = 1;
};

namespace detail {

// Ground-truth images sorted by id; aggregation follows this order.
inline std::vector<const ImageAnnotation*> sorted_images(const DatasetManifest& gt) {
  std::vector<const ImageAnnotation*> order;
  order.reserve(gt.images.size());
  for (const auto& img : gt.images) order.push_back(&img);
  std::stable_sort(order.begin(), order.end(),
                   [](const auto* a, const auto* b) { return a->image_id < b->image_id; });
  return order;
}

inline std::vector<MatchCounts> match_all(const std::vector<const ImageAnnotation*>& images,
                                          const std::vector<std::vector<Polygon>>& preds,
                                          const EvalConfig& cfg, unsigned threads) {
  std::vector<MatchCounts> out(images.size());
  parallel_for(images.size(), threads,
               [&](std::size_t i) { out[i] = match_image(*images[i], preds[i], cfg).counts; });
  return out;
}

}  // namespace detail

/// Dataset-level evaluation. Predictions for images absent from the ground
/// truth are ignored; ground-truth images without predictions count as
/// having none. Both produce warnings.
inline EvalReport evaluate(const DatasetManifest& gt, const DetectionSet& det,
                           const EvalConfig& cfg, const EvalOptions& opts = {},
                           Diagnostics* diags = nullptr) {
  cfg.validate();
  const auto images = detail::sorted_images(gt);
  std::set<std::string_view> gt_ids;
  for (const auto* img : images) gt_ids.insert(img->image_id);
  for (const auto& [id, polys] : det.per_image) {
    if (!gt_ids.contains(id)) {
      detail::emit(diags, Severity::Warning, "orphan_prediction", id,
                   "predictions for an image absent from the ground truth are ignored");
    }
  }

  std::vector<std::vector<Polygon>> preds(images.size());
  std::size_t missing = 0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (!det.per_image.contains(images[i]->image_id)) ++missing;
    preds[i] = det.polygons_for(images[i]->image_id);
  }
  if (missing > 0) {
    detail::emit(diags, Severity::Warning, "missing_predictions", det.detector_name,
                 std::to_string(missing) + " ground-truth image(s) have no detection entry");
  }

  EvalReport report;
  report.detector = det.detector_name;
  report.config = cfg;
  report.images = images.size();
  const auto counts = detail::match_all(images, preds, cfg, opts.threads);
  for (const auto& c : counts) report.counts += c;
  report.scores = scores_from(report.counts);
  if (opts.per_image) {
    std::vector<ImageScore> rows;
    rows.reserve(images.size());
    for (std::size_t i = 0; i < images.size(); ++i) rows.push_back({images[i]->image_id, counts[i]});
    report.per_image = std::move(rows);
  }
  if (opts.per_category) {
    std::map<ChallengeCategory, CategoryScore> cats;
    for (ChallengeCategory c : kAllCategories) {
      EvalConfig cc = cfg;
      cc.mode = EvalMode::category(c);
      MatchCounts total;
      for (const auto& m : detail::match_all(images, preds, cc, opts.threads)) total += m;
      cats[c] = {total, scores_from(total)};
    }
    report.per_category = std::move(cats);
  }
  return report;
}

// Per-category comparison table ----------------------------------------------------

struct CategoryTableRow {
  std::string detector;
  std::array<std::optional<double>, kCategoryCount> category_f{};  // indexed by enum value
  std::optional<double> hard_f;
  std::optional<double> norm_f;

  std::optional<double> category(ChallengeCategory c) const {
    return category_f[static_cast<std::size_t>(c)];
  }
};

/// One row per detector: F-measure for every category, Hard and Norm.
/// Cells with no care region under the mode are empty.
inline std::vector<CategoryTableRow> eval_all_categories(const DatasetManifest& gt,
                                                         std::span<const DetectionSet> detectors,
                                                         EvalConfig cfg, unsigned threads = 1,
                                                         Diagnostics* diags = nullptr) {
  std::vector<CategoryTableRow> rows;
  for (const DetectionSet& det : detectors) {
    CategoryTableRow row;
    row.detector = det.detector_name;
    EvalOptions opts;
    opts.per_category = true;
    opts.threads = threads;
    cfg.mode = EvalMode::norm();
    const EvalReport norm = evaluate(gt, det, cfg, opts, diags);
    auto defined = [](const MatchCounts& c, const Scores& s) -> std::optional<double> {
      if (c.true_positives + c.false_negatives == 0) return std::nullopt;
      return s.f_measure;
    };
    row.norm_f = defined(norm.counts, norm.scores);
    for (const auto& [c, score] : *norm.per_category) {
      row.category_f[static_cast<std::size_t>(c)] = defined(score.counts, score.scores);
    }
    cfg.mode = EvalMode::hard();
    opts.per_category = false;
    const EvalReport hard = evaluate(gt, det, cfg, opts, nullptr);
    row.hard_f = defined(hard.counts, hard.scores);
    rows.push_back(std::move(row));
  }
  return rows;
}

// Fine-tuning gap --------------------------------------------------------------

/// (fine-tune dataset, evaluation dataset) → F-measure.
using CrossEvalResults = std::map<std::pair<std::string, std::string>, double>;

struct GapEntry {
  std::string train;
  std::string test;
  double in_domain = 0.0;
  double cross_domain = 0.0;
  double gap = 0.0;  // in_domain - cross_domain
};

struct GapMatrix {
  std::vector<std::string> rows;     // fine-tune datasets, sorted
  std::vector<std::string> columns;  // evaluation datasets, sorted
  CrossEvalResults cells;
  std::vector<GapEntry> gaps;        // row-major over (rows, columns), diagonal excluded
  double max_gap = 0.0;
  double mean_gap = 0.0;

  std::optional<double> cell(const std::string& train, const std::string& test) const {
    if (auto it = cells.find({train, test}); it != cells.end()) return it->second;
    return std::nullopt;
  }

  std::optional<double> gap(const std::string& train, const std::string& test) const {
    for (const auto& g : gaps) {
      if (g.train == train && g.test == test) return g.gap;
    }
    return std::nullopt;
  }

  /// Unweighted mean of the row's available cells.
  std::optional<double> row_mean(const std::string& train) const {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& [key, f] : cells) {
      if (key.first != train) continue;
      sum += f;
      ++n;
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
  }
};

/// Throws MissingDiagonal when a fine-tune dataset lacks its in-domain cell.
inline GapMatrix gap_report(const CrossEvalResults& results) {
  GapMatrix m;
  m.cells = results;
  std::set<std::string> rows;
  std::set<std::string> cols;
  for (const auto& [key, f] : results) {
    rows.insert(key.first);
    cols.insert(key.second);
  }
  m.rows.assign(rows.begin(), rows.end());
  m.columns.assign(cols.begin(), cols.end());
  for (const auto& r : m.rows) {
    const auto diag = m.cell(r, r);
    if (!diag) throw MissingDiagonal("no in-domain result for \"" + r + "\"");
    for (const auto& c : m.columns) {
      if (c == r) continue;
      if (auto cross = m.cell(r, c)) m.gaps.push_back({r, c, *diag, *cross, *diag - *cross});
    }
  }
  if (!m.gaps.empty()) {
    double sum = 0.0;
    m.max_gap = m.gaps.front().gap;
    for (const auto& g : m.gaps) {
      sum += g.gap;
      m.max_gap = std::max(m.max_gap, g.gap);
    }
    m.mean_gap = sum / static_cast<double>(m.gaps.size());
  }
  return m;
}

/// Unweighted mean of per-dataset F values (the "Avg." column).
inline double unweighted_mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

}  // namespace lttext
