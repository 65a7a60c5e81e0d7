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

#include <gtest/gtest.h>

#include <random>

#include "lttext/eval.hpp"
#include "lttext/formats.hpp"
#include "lttext/report.hpp"
#include "support/eval_fixtures.hpp"
#include "support/polygon_gen.hpp"

namespace lttext {
namespace {

using testing::box;

TextInstance word(Polygon p, std::initializer_list<ChallengeCategory> cats = {}, bool care = true) {
  TextInstance t;
  t.polygon = std::move(p);
  t.care = care;
  for (auto c : cats) t.categories.insert(c);
  return t;
}

ImageAnnotation image(std::string id, std::vector<TextInstance> words) {
  ImageAnnotation img;
  img.image_id = std::move(id);
  img.width = 500;
  img.height = 500;
  img.instances = std::move(words);
  return img;
}

std::vector<bool> care_flags(const ImageAnnotation& img) {
  std::vector<bool> out;
  for (const auto& t : img.instances) out.push_back(t.care);
  return out;
}

TEST(Mode, ParseAndPrint) {
  EXPECT_EQ(EvalMode::parse("norm"), EvalMode::norm());
  EXPECT_EQ(EvalMode::parse("hard"), EvalMode::hard());
  EXPECT_EQ(EvalMode::parse("category:occluded"), EvalMode::category(ChallengeCategory::Occluded));
  EXPECT_FALSE(EvalMode::parse("category:blury").has_value());
  EXPECT_FALSE(EvalMode::parse("medium").has_value());
  EXPECT_EQ(EvalMode::parse(EvalMode::category(ChallengeCategory::LowContrast).to_string()),
            EvalMode::category(ChallengeCategory::LowContrast));
}

TEST(Config, RejectsOutOfRangeThresholds) {
  EvalConfig c;
  EXPECT_NO_THROW(c.validate());
  c.iou_threshold = 0.0;
  EXPECT_THROW(c.validate(), Error);
  c.iou_threshold = 1.0;
  c.dontcare_overlap_threshold = 1.5;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Relabel, NormIsIdentity) {
  const auto img = image("a", {word(box(0, 0, 5, 5), {ChallengeCategory::Blurred}), word(box(9, 0, 15, 5)),
                               word(box(20, 0, 25, 5), {}, false)});
  EXPECT_EQ(relabel_for_mode(img, EvalMode::norm()), img);
}

TEST(Relabel, HardKeepsOnlyTaggedCareWords) {
  const auto img = image("a", {word(box(0, 0, 5, 5)), word(box(9, 0, 15, 5), {ChallengeCategory::Blurred}),
                               word(box(20, 0, 25, 5))});
  EXPECT_EQ(care_flags(relabel_for_mode(img, EvalMode::hard())), (std::vector{false, true, false}));
}

TEST(Relabel, HardLeavesTaggedDontCareIgnored) {
  const auto img = image("a", {word(box(0, 0, 5, 5), {ChallengeCategory::Blurred}, false)});
  EXPECT_EQ(care_flags(relabel_for_mode(img, EvalMode::hard())), (std::vector{false}));
}

TEST(Relabel, CategoryRequiresMembership) {
  const auto img = image("a", {word(box(0, 0, 5, 5), {ChallengeCategory::Blurred, ChallengeCategory::Occluded}),
                               word(box(9, 0, 15, 5), {ChallengeCategory::Blurred})});
  EXPECT_EQ(care_flags(relabel_for_mode(img, EvalMode::category(ChallengeCategory::Occluded))),
            (std::vector{true, false}));
}

TEST(Match, PerfectDetector) {
  const auto img = image("a", {word(box(0, 0, 5, 5)), word(box(9, 0, 15, 5)), word(box(20, 0, 25, 5))});
  std::vector<Polygon> preds;
  for (const auto& t : img.instances) preds.push_back(t.polygon);
  const auto r = match_image(img, preds, EvalConfig{});
  EXPECT_EQ(r.counts, (MatchCounts{3, 0, 0}));
}

TEST(Match, OneOfTwo) {
  // IoU of [0,10]² against [0,10]×[0,8] is 80/100.
  const auto img = image("a", {word(box(0, 0, 10, 10)), word(box(50, 0, 60, 10))});
  const std::vector<Polygon> preds = {box(0, 0, 10, 8)};
  const auto r = match_image(img, preds, EvalConfig{});
  ASSERT_EQ(r.pairs.size(), 1u);
  EXPECT_NEAR(r.pairs[0].iou, 0.8, 1e-12);
  EXPECT_EQ(r.counts, (MatchCounts{1, 0, 1}));
  const Scores s = scores_from(r.counts);
  EXPECT_DOUBLE_EQ(s.precision, 1.0);
  EXPECT_DOUBLE_EQ(s.recall, 0.5);
  EXPECT_NEAR(s.f_measure, 2.0 / 3.0, 1e-12);
}

TEST(Match, PredictionInsideDontCareIsIgnored) {
  const auto img = image("a", {word(box(0, 0, 20, 20), {}, false)});
  const std::vector<Polygon> preds = {box(5, 5, 10, 10)};
  const auto r = match_image(img, preds, EvalConfig{});
  EXPECT_EQ(r.counts, (MatchCounts{0, 0, 0}));
  EXPECT_EQ(r.suppressed, std::vector<std::size_t>{0});
}

TEST(Match, GreedyTieBreakIsByIndex) {
  // Two identical ground-truth boxes, one prediction: the lower index wins.
  const auto img = image("a", {word(box(0, 0, 10, 10)), word(box(0, 0, 10, 10))});
  const std::vector<Polygon> preds = {box(0, 0, 10, 10)};
  const auto r = match_image(img, preds, EvalConfig{});
  ASSERT_EQ(r.pairs.size(), 1u);
  EXPECT_EQ(r.pairs[0].gt_index, 0u);
  EXPECT_EQ(r.unmatched_gt, std::vector<std::size_t>{1});
}

TEST(Evaluate, EmptyDetections) {
  DatasetManifest gt;
  gt.images.push_back(image("a", {word(box(0, 0, 10, 10))}));
  Diagnostics d;
  const auto r = evaluate(gt, DetectionSet{}, EvalConfig{}, {}, &d);
  EXPECT_EQ(r.scores.precision, 0.0);
  EXPECT_EQ(r.scores.recall, 0.0);
  EXPECT_EQ(r.scores.f_measure, 0.0);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].code, "missing_predictions");
}

TEST(Evaluate, MicroAggregation) {
  // (TP, FP, FN) = (1, 0, 1) on x and (1, 1, 0) on y.
  DatasetManifest gt;
  gt.images.push_back(image("x", {word(box(0, 0, 10, 10)), word(box(50, 0, 60, 10))}));
  gt.images.push_back(image("y", {word(box(0, 0, 10, 10))}));
  DetectionSet det;
  det.per_image["x"] = {{box(0, 0, 10, 10), {}}};
  det.per_image["y"] = {{box(0, 0, 10, 10), {}}, {box(200, 200, 210, 210), {}}};
  const auto r = evaluate(gt, det, EvalConfig{});
  EXPECT_EQ(r.counts, (MatchCounts{2, 1, 1}));
  EXPECT_NEAR(r.scores.precision, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.scores.recall, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.scores.f_measure, 2.0 / 3.0, 1e-12);
}

TEST(Evaluate, OrphanPredictionsWarn) {
  DatasetManifest gt;
  gt.images.push_back(image("a", {word(box(0, 0, 10, 10))}));
  DetectionSet det;
  det.per_image["a"] = {{box(0, 0, 10, 10), {}}};
  det.per_image["ghost"] = {{box(0, 0, 10, 10), {}}};
  Diagnostics d;
  const auto r = evaluate(gt, det, EvalConfig{}, {}, &d);
  EXPECT_EQ(r.counts, (MatchCounts{1, 0, 0}));
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].code, "orphan_prediction");
}

TEST(Evaluate, HandEnumeratedFixture) {
  const std::string dir = LTTEXT_TEST_DATA "/matching/";
  const auto gt = load_manifest(dir + "gt.json");
  const auto det = load_detections(dir + "det.json");
  EvalOptions opts;
  opts.per_image = true;
  const auto r = evaluate(gt, det, EvalConfig{}, opts);
  EXPECT_EQ(r.counts, (MatchCounts{4, 1, 1}));
  EXPECT_NEAR(r.scores.f_measure, 0.8, 1e-12);
  ASSERT_TRUE(r.per_image.has_value());
  EXPECT_EQ((*r.per_image)[0].counts, (MatchCounts{2, 0, 0}));
  EXPECT_EQ((*r.per_image)[1].counts, (MatchCounts{1, 0, 1}));
  EXPECT_EQ((*r.per_image)[2].counts, (MatchCounts{1, 1, 0}));
}

TEST(Evaluate, HardFixtureReportsFortyFivePointSeven) {
  const auto f = testing::make_hard_457_fixture();
  EvalConfig cfg;
  cfg.mode = EvalMode::hard();
  const auto r = evaluate(f.gt, f.det, cfg);
  EXPECT_EQ(r.counts, (MatchCounts{457, 543, 543}));
  EXPECT_NEAR(r.scores.f_measure, 0.457, 1e-12);
  EXPECT_EQ(format_percent(r.scores.f_measure), "45.7");
  // Norm additionally credits the 500 untagged words.
  cfg.mode = EvalMode::norm();
  EXPECT_EQ(evaluate(f.gt, f.det, cfg).counts, (MatchCounts{957, 543, 543}));
}

TEST(Evaluate, CategoryModeEqualsNormOnRelabelledManifest) {
  const auto f = testing::make_hard_457_fixture();
  for (ChallengeCategory c : kAllCategories) {
    EvalConfig cat;
    cat.mode = EvalMode::category(c);
    const auto a = evaluate(f.gt, f.det, cat);
    const auto b = evaluate(relabel_for_mode(f.gt, cat.mode), f.det, EvalConfig{});
    EXPECT_EQ(a.counts, b.counts) << to_string(c);
    EvalReport b2 = b;
    b2.config = a.config;
    EXPECT_EQ(render_eval_json(a), render_eval_json(b2)) << to_string(c);
  }
}

TEST(Evaluate, PerCategoryMatchesSeparateRuns) {
  const auto f = testing::make_hard_457_fixture();
  EvalOptions opts;
  opts.per_category = true;
  const auto r = evaluate(f.gt, f.det, EvalConfig{}, opts);
  ASSERT_TRUE(r.per_category.has_value());
  for (ChallengeCategory c : kAllCategories) {
    EvalConfig cat;
    cat.mode = EvalMode::category(c);
    EXPECT_EQ(r.per_category->at(c).counts, evaluate(f.gt, f.det, cat).counts);
  }
}

TEST(Evaluate, ThreadCountDoesNotChangeReport) {
  const auto f = testing::make_hard_457_fixture();
  EvalOptions one;
  one.per_category = true;
  one.per_image = true;
  const std::string base = render_eval_json(evaluate(f.gt, f.det, EvalConfig{}, one));
  for (unsigned t : {4u, 16u}) {
    EvalOptions many = one;
    many.threads = t;
    EXPECT_EQ(render_eval_json(evaluate(f.gt, f.det, EvalConfig{}, many)), base);
  }
}

TEST(Properties, RaisingThresholdNeverAddsMatches) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const auto c = testing::random_matching_case(rng);
    std::size_t prev = c.preds.size() + 1;
    for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      EvalConfig cfg;
      cfg.iou_threshold = t;
      const std::size_t tp = match_image(c.gt, c.preds, cfg).counts.true_positives;
      EXPECT_LE(tp, prev);
      prev = tp;
    }
  }
}

TEST(Properties, AddingPredictionsNeverShrinksTpPlusFp) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    auto c = testing::random_matching_case(rng);
    const auto before = match_image(c.gt, c.preds, EvalConfig{}).counts;
    c.preds.push_back(testing::box(5, 5, 30, 20));
    const auto after = match_image(c.gt, c.preds, EvalConfig{}).counts;
    EXPECT_GE(after.true_positives + after.false_positives,
              before.true_positives + before.false_positives);
  }
}

TEST(Properties, GreedyIsNearOptimal) {
  std::mt19937_64 rng(13);
  int agree = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto c = testing::random_matching_case(rng);
    const std::size_t greedy = match_image(c.gt, c.preds, EvalConfig{}).counts.true_positives;
    const std::size_t best = testing::optimal_matches(c, 0.5);
    EXPECT_LE(greedy, best);
    agree += greedy == best;
  }
  EXPECT_GE(agree, 990);
}

TEST(Gap, PublishedRows) {
  CrossEvalResults dp = {{{"ic15", "ic15"}, 77.4}, {{"ic15", "tt"}, 77.3},
                         {{"tt", "tt"}, 89.0},     {{"tt", "ic15"}, 73.9}};
  const GapMatrix g = gap_report(dp);
  EXPECT_NEAR(*g.gap("tt", "ic15"), 15.1, 1e-9);
  EXPECT_NEAR(*g.gap("ic15", "tt"), 0.1, 1e-9);
  EXPECT_NEAR(g.max_gap, 15.1, 1e-9);
  EXPECT_NEAR(g.mean_gap, 7.6, 1e-9);

  CrossEvalResults abc = {{{"ic15", "ic15"}, 88.2}, {{"ic15", "tt"}, 77.8},
                          {{"tt", "tt"}, 87.2},     {{"tt", "ic15"}, 77.4}};
  EXPECT_NEAR(*gap_report(abc).gap("ic15", "tt"), 10.4, 1e-9);
}

TEST(Gap, EqualCellsGiveZero) {
  const GapMatrix g = gap_report({{{"a", "a"}, 50.0}, {{"a", "b"}, 50.0}});
  EXPECT_EQ(*g.gap("a", "b"), 0.0);
  EXPECT_DOUBLE_EQ(*g.row_mean("a"), 50.0);
}

TEST(Gap, MissingDiagonal) {
  EXPECT_THROW(gap_report({{{"a", "b"}, 50.0}}), MissingDiagonal);
}

TEST(Gap, UnweightedMean) {
  const std::vector<double> v = {10.0, 20.0, 60.0};
  EXPECT_DOUBLE_EQ(unweighted_mean(v), 30.0);
  EXPECT_EQ(unweighted_mean(std::span<const double>{}), 0.0);
}

}  // namespace
}  // namespace lttext
