// Copyright 2026 The Authors.
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

#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "exsel/embedspace.hpp"
#include "exsel/io.hpp"
#include "oracle.hpp"

namespace exsel {
namespace {

StimulusSet two_d_set(std::vector<std::vector<double>> embeddings) {
  std::vector<Stimulus> stimuli;
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    stimuli.push_back({"s" + std::to_string(i), 10.0 * i, embeddings[i]});
  }
  return make_stimulus_set("toy", 90.0, 45.0, std::move(stimuli));
}

TEST(LoadStimulusSet, ValidDocumentIsNormalized) {
  std::istringstream doc(R"({
    "category_name": "dax", "max_scale": 90, "midpoint_scale": 45,
    "stimuli": [
      {"id": "a", "scale": 0,  "embedding": [3, 4]},
      {"id": "b", "scale": 45, "embedding": [0, 2]},
      {"id": "c", "scale": 90, "embedding": [1, 1]}
    ]})");
  const StimulusSet set = load_stimulus_set(doc);
  ASSERT_EQ(set.size(), 3u);
  EXPECT_EQ(set.category_name(), "dax");
  EXPECT_EQ(set.dim(), 2u);
  for (const auto& s : set.stimuli()) {
    EXPECT_NEAR(std::sqrt(detail::dot(s.embedding, s.embedding)), 1.0, kUnitNormTolerance);
  }
  EXPECT_DOUBLE_EQ(set[0].embedding[0], 0.6);
}

TEST(LoadStimulusSet, ZeroNormEmbeddingRejected) {
  std::istringstream doc(R"({"category_name": "dax", "max_scale": 90,
    "midpoint_scale": 45, "stimuli": [{"id": "a", "scale": 0, "embedding": [0, 0, 0]}]})");
  EXPECT_THROW(
      {
        try {
          load_stimulus_set(doc);
        } catch (const ValidationError& e) {
          EXPECT_NE(std::string(e.what()).find("zero-norm"), std::string::npos);
          throw;
        }
      },
      ValidationError);
}

TEST(LoadStimulusSet, ScaleOutOfRangeRejected) {
  std::istringstream doc(R"({"category_name": "bem", "max_scale": 100,
    "midpoint_scale": 50, "stimuli": [{"id": "a", "scale": 120, "embedding": [1, 0]}]})");
  EXPECT_THROW(load_stimulus_set(doc), ValidationError);
}

TEST(LoadStimulusSet, StructuralErrors) {
  const char* bad[] = {
      "not json",
      R"({"category_name": "x", "max_scale": 90, "midpoint_scale": 45, "stimuli": []})",
      R"({"category_name": "x", "max_scale": 90, "midpoint_scale": 45,
          "stimuli": [{"id": "a", "scale": 1, "embedding": [1]},
                      {"id": "a", "scale": 2, "embedding": [1]}]})",
      R"({"category_name": "x", "max_scale": 90, "midpoint_scale": 45,
          "stimuli": [{"id": "a", "scale": 1, "embedding": [1, 0]},
                      {"id": "b", "scale": 2, "embedding": [1]}]})",
      R"({"category_name": "x", "max_scale": 90, "midpoint_scale": 90,
          "stimuli": [{"id": "a", "scale": 1, "embedding": [1]}]})",
      R"({"category_name": "x", "max_scale": 90,
          "stimuli": [{"id": "a", "scale": 1, "embedding": [1]}]})",
      R"({"category_name": "x", "max_scale": 90, "midpoint_scale": 45,
          "stimuli": [{"id": "a", "scale": "1", "embedding": [1]}]})",
  };
  for (const char* text : bad) {
    std::istringstream doc(text);
    EXPECT_THROW(load_stimulus_set(doc), ValidationError) << text;
  }
}

TEST(SimilarityMatrix, HandComputedEntries) {
  const double h = std::sqrt(2.0) / 2.0;
  const auto set = two_d_set({{1, 0}, {h, h}, {0, 1}, {1, 0}, {-1, 0}});
  const auto sim = similarity_matrix(set);
  EXPECT_NEAR(sim(0, 1), 0.7071067811865476, 1e-12);
  EXPECT_NEAR(sim(0, 2), 0.0, 1e-15);
  EXPECT_EQ(sim(0, 3), 1.0);
  EXPECT_NEAR(distance(sim, 0, 1), 0.2928932188134524, 1e-12);
  EXPECT_EQ(distance(sim, 2, 2), 0.0);
  EXPECT_NEAR(distance(sim, 0, 4), 2.0, 1e-15);
  EXPECT_THROW(distance(sim, 0, 5), ValidationError);
}

TEST(SimilarityMatrix, RejectsInvalidRawMatrices) {
  EXPECT_THROW(SimilarityMatrix(2, {1, 0.5, 0.4, 1}), ValidationError);
  EXPECT_THROW(SimilarityMatrix(2, {0.9, 0.5, 0.5, 1}), ValidationError);
  EXPECT_THROW(SimilarityMatrix(2, {1, 1.5, 1.5, 1}), ValidationError);
  EXPECT_THROW(SimilarityMatrix(2, {1, 0.5, 0.5}), ValidationError);
  EXPECT_NO_THROW(SimilarityMatrix(2, {1, 0.5, 0.5, 1}));
}

TEST(SimilarityMatrix, RandomSetsSymmetricUnitDiagonal) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto set = oracle::random_set(rng, 2 + trial % 15, 1 + trial % 9);
    const auto sim = similarity_matrix(set);
    for (std::size_t i = 0; i < sim.size(); ++i) {
      EXPECT_NEAR(sim(i, i), 1.0, 1e-9);
      for (std::size_t j = 0; j < sim.size(); ++j) {
        EXPECT_EQ(sim(i, j), sim(j, i));
        EXPECT_DOUBLE_EQ(distance(sim, i, j) + sim(i, j), 1.0);
        EXPECT_LE(std::abs(sim(i, j)), 1.0 + 1e-9);
      }
    }
  }
}

TEST(SimilarityMatrix, RenormalizingUnitInputIsStable) {
  std::mt19937_64 rng(11);
  const auto set = oracle::random_set(rng, 12, 16);
  const auto again = make_stimulus_set(set.category_name(), set.max_scale(),
                                       set.midpoint_scale(), set.stimuli());
  const auto a = similarity_matrix(set);
  const auto b = similarity_matrix(again);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) EXPECT_NEAR(a(i, j), b(i, j), 1e-12);
}

TEST(StimulusSet, MidpointIndexPrefersLowerIndexOnTies) {
  const auto set = make_stimulus_set(
      "x", 90.0, 45.0, {{"a", 40, {1, 0}}, {"b", 50, {0, 1}}, {"c", 90, {1, 1}}});
  EXPECT_EQ(set.midpoint_index(), 0u);
}

}  // namespace
}  // namespace exsel
