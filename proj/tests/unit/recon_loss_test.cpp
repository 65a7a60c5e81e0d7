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

#include "lttext/recon_loss.hpp"
#include "support/loss_oracle.hpp"

namespace lttext {
namespace {

LossConfig config(double alpha, double threshold) {
  LossConfig c;
  c.alpha = alpha;
  c.threshold = threshold;
  return c;
}

void expect_rel(double actual, double expected, double tol = 1e-9) {
  EXPECT_LE(std::abs(actual - expected), tol * std::max(1.0, std::abs(expected)))
      << actual << " vs " << expected;
}

TEST(Binarize, StrictInequality) {
  const GuidanceMap all_half(2, 2, {0.5, 0.5, 0.5, 0.5});
  EXPECT_EQ(binarize_mask(all_half, 0.1).cells, (std::vector<std::uint8_t>{1, 1, 1, 1}));
  EXPECT_EQ(binarize_mask(all_half, 0.5).cells, (std::vector<std::uint8_t>{0, 0, 0, 0}));
  EXPECT_EQ(binarize_mask(GuidanceMap(1, 3, {0.2, 0.9, 0.4}), 2.0).cells,
            (std::vector<std::uint8_t>{0, 0, 0}));
}

TEST(Loss, ZeroResidual) {
  const ImageTensor a(3, 4, 3, 0.42);
  const GuidanceMap g(3, 4, std::vector<double>(12, 0.3));
  for (double alpha : {0.0, 0.3, 1.0}) {
    for (double t : {-1.0, 0.3, 5.0}) EXPECT_EQ(balanced_reconstruction_loss(a, a, g, config(alpha, t)), 0.0);
  }
}

TEST(Loss, ReducesToSquaredError) {
  const ImageTensor a(1, 1, 1, 0.0);
  const ImageTensor b(1, 1, 1, 0.5);
  const GuidanceMap g(1, 1, {1.0});
  expect_rel(balanced_reconstruction_loss(a, b, g, config(1.0, 0.1)), 0.25);
}

TEST(Loss, HandEvaluatedTwoByTwo) {
  const ImageTensor a(2, 2, 1, 0.0);
  const ImageTensor b(2, 2, 1, 1.0);
  const GuidanceMap g(2, 2, {0.9, 0.9, 0.0, 0.0});
  const LossConfig cfg = config(0.9, 0.1);
  expect_rel(balanced_reconstruction_loss(a, b, g, cfg), 2.0);
  const LossTerms terms = loss_decomposition(a, b, g, cfg);
  expect_rel(terms.text_term, 1.8);
  expect_rel(terms.background_term, 0.2);
}

TEST(Loss, ChannelsAreSummed) {
  const ImageTensor a(1, 1, 3, {0.0, 0.0, 0.0});
  const ImageTensor b(1, 1, 3, {1.0, 2.0, 3.0});
  const GuidanceMap g(1, 1, {0.0});
  expect_rel(balanced_reconstruction_loss(a, b, g, config(0.0, 0.5)), 14.0);
  LossConfig n = config(0.0, 0.5);
  n.normalize = true;
  expect_rel(balanced_reconstruction_loss(a, b, g, n), 14.0 / 3.0);
}

TEST(Loss, DimensionMismatch) {
  const ImageTensor a(2, 2, 1, 0.0);
  const ImageTensor b(2, 3, 1, 0.0);
  const GuidanceMap g(2, 2, {0, 0, 0, 0});
  EXPECT_THROW(balanced_reconstruction_loss(a, b, g, LossConfig{}), DimensionMismatch);
  EXPECT_THROW(balanced_reconstruction_loss(a, a, GuidanceMap(1, 2, {0, 0}), LossConfig{}), DimensionMismatch);
  EXPECT_THROW(ImageTensor(2, 2, 1, std::vector<double>(3)), DimensionMismatch);
}

TEST(Loss, RejectsBadConfig) {
  const ImageTensor a(1, 1, 1, 0.0);
  const GuidanceMap g(1, 1, {0.0});
  EXPECT_THROW(balanced_reconstruction_loss(a, a, g, config(1.5, 0.1)), Error);
}

TEST(Decomposition, SymmetricAlphaAndEmptyText) {
  std::mt19937_64 rng(3);
  const auto in = testing::random_loss_inputs(rng, 6, 5, 3);
  const auto [text, background] = testing::region_sums(in, 0.4);
  const LossTerms half = loss_decomposition(in.image, in.recon, in.guidance, config(0.5, 0.4));
  expect_rel(half.text_term, 0.5 * text);
  expect_rel(half.background_term, 0.5 * background);
  const GuidanceMap zero(6, 5, std::vector<double>(30, 0.0));
  EXPECT_EQ(loss_decomposition(in.image, in.recon, zero, config(0.7, 0.1)).text_term, 0.0);
}

TEST(Properties, AdditivityAndAffineInAlpha) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const auto in = testing::random_loss_inputs(rng, 1 + rng() % 9, 1 + rng() % 9, 1 + rng() % 3);
    const double t = 0.2 + 0.6 * (static_cast<double>(rng() % 1000) / 1000.0);
    const auto [a, b] = testing::region_sums(in, t);
    for (double alpha : {0.0, 0.5, 1.0, 0.37}) {
      const LossConfig cfg = config(alpha, t);
      const double total = balanced_reconstruction_loss(in.image, in.recon, in.guidance, cfg);
      expect_rel(total, alpha * (a - b) + b);
      expect_rel(loss_decomposition(in.image, in.recon, in.guidance, cfg).total(), total);
      EXPECT_GE(total, 0.0);
    }
  }
}

TEST(Properties, ZeroOnlyForIdenticalInputs) {
  std::mt19937_64 rng(5);
  auto in = testing::random_loss_inputs(rng, 4, 4, 3);
  ImageTensor almost = in.image;
  almost.set(2, 3, 1, in.image.at(2, 3, 1) + 1e-3);
  EXPECT_GT(balanced_reconstruction_loss(in.image, almost, in.guidance, config(0.3, 0.5)), 0.0);
}

TEST(Properties, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(6);
  for (double alpha : {0.9, 0.5, 0.1}) {
    const auto in = testing::random_loss_inputs(rng, 8, 8, 3);
    const auto check = testing::check_gradient(rng, in, config(alpha, 0.5));
    EXPECT_LE(check.worst_relative_error, 1e-5) << check.detail;
  }
}

TEST(Properties, BitStableAcrossRuns) {
  std::mt19937_64 rng(7);
  const auto in = testing::random_loss_inputs(rng, 64, 48, 3);
  const double first = balanced_reconstruction_loss(in.image, in.recon, in.guidance, LossConfig{});
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(balanced_reconstruction_loss(in.image, in.recon, in.guidance, LossConfig{}), first);
  }
}

}  // namespace
}  // namespace lttext
