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

// Scale-space scores for a selection (model- or human-produced), their exact
// chance baselines under uniform random selection, and chance-centering.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "exsel/embedspace.hpp"
#include "exsel/error.hpp"
#include "exsel/objectives.hpp"

namespace exsel {

// Denominator of the prototypicality score. MaxScale matches how chance
// values and the diversity score are normalized; Midpoint is the literal
// |s - m| / m form.
enum class Normalization { MaxScale, Midpoint };

inline constexpr std::string_view to_string(Normalization mode) {
  return mode == Normalization::MaxScale ? "max-scale" : "midpoint";
}

inline Normalization parse_normalization(std::string_view name) {
  if (name == "max-scale") return Normalization::MaxScale;
  if (name == "midpoint") return Normalization::Midpoint;
  throw ValidationError("unknown normalization '" + std::string(name) + "'");
}

struct ScoreReport {
  std::size_t quota = 0;
  Normalization normalization = Normalization::MaxScale;
  double prototypicality_score = 0.0;
  double chance_prototypicality = 0.0;
  double centered_prototypicality = 0.0;
  std::optional<double> diversity_score;
  std::optional<double> chance_diversity;
  std::optional<double> centered_diversity;
};

namespace detail {

inline void check_scales(const StimulusSet& set, std::span<const double> scales) {
  for (double s : scales) {
    require(std::isfinite(s) && s >= 0.0 && s <= set.max_scale(),
            "scale " + std::to_string(s) + " outside [0, " +
                std::to_string(set.max_scale()) + "] for category '" +
                set.category_name() + "'");
  }
}

inline double prototypicality_denominator(const StimulusSet& set,
                                          Normalization mode) {
  return mode == Normalization::MaxScale ? set.max_scale() : set.midpoint_scale();
}

}  // namespace detail

// Mean normalized distance of the chosen scales to the midpoint. Higher means
// less prototypical.
inline double prototypicality_score(const StimulusSet& set,
                                    std::span<const double> scales,
                                    Normalization mode = Normalization::MaxScale) {
  detail::require(!scales.empty(), "prototypicality score of an empty selection");
  detail::check_scales(set, scales);
  const double denom = detail::prototypicality_denominator(set, mode);
  double total = 0.0;
  for (double s : scales) total += std::abs(s - set.midpoint_scale()) / denom;
  return total / static_cast<double>(scales.size());
}

// Largest pairwise scale gap, divided by the category's max scale.
inline double diversity_score(const StimulusSet& set, std::span<const double> scales) {
  detail::require(scales.size() >= 2, "diversity score needs at least two exemplars");
  detail::check_scales(set, scales);
  const auto [lo, hi] = std::minmax_element(scales.begin(), scales.end());
  return (*hi - *lo) / set.max_scale();
}

// Expected prototypicality score of M distinct stimuli drawn uniformly. By
// linearity of expectation this is the mean over single stimuli, so the quota
// only has to be valid.
inline double chance_prototypicality(const StimulusSet& set, std::size_t quota,
                                     Normalization mode = Normalization::MaxScale) {
  detail::check_quota(quota, set.size());
  const double denom = detail::prototypicality_denominator(set, mode);
  double total = 0.0;
  for (const Stimulus& s : set.stimuli()) {
    total += std::abs(s.scale - set.midpoint_scale()) / denom;
  }
  return total / static_cast<double>(set.size());
}

// Same expectation by averaging the score over every C(n, M) subset.
inline double chance_prototypicality_enumerated(
    const StimulusSet& set, std::size_t quota,
    Normalization mode = Normalization::MaxScale,
    std::uint64_t budget = kDefaultEnumerationBudget) {
  detail::check_quota(quota, set.size());
  const std::uint64_t count = detail::binomial(set.size(), quota);
  if (count > budget) {
    throw BudgetExceeded("chance enumeration over " + std::to_string(count) +
                         " subsets exceeds the budget");
  }
  std::vector<std::size_t> comb(quota);
  for (std::size_t k = 0; k < quota; ++k) comb[k] = k;
  double total = 0.0;
  do {
    total += prototypicality_score(set, set.scales_of(comb), mode);
  } while (detail::next_combination(comb, set.size()));
  return total / static_cast<double>(count);
}

// Mean diversity score over every C(n, M) subset.
inline double chance_diversity(const StimulusSet& set, std::size_t quota,
                               std::uint64_t budget = kDefaultEnumerationBudget) {
  detail::check_quota(quota, set.size());
  detail::require(quota >= 2, "chance diversity needs a quota of at least two");
  const std::uint64_t count = detail::binomial(set.size(), quota);
  if (count > budget) {
    throw BudgetExceeded("chance enumeration over " + std::to_string(count) +
                         " subsets exceeds the budget");
  }
  std::vector<std::size_t> comb(quota);
  for (std::size_t k = 0; k < quota; ++k) comb[k] = k;
  double total = 0.0;
  do {
    total += diversity_score(set, set.scales_of(comb));
  } while (detail::next_combination(comb, set.size()));
  return total / static_cast<double>(count);
}

inline ScoreReport score_selection(const StimulusSet& set,
                                   std::span<const double> scales,
                                   std::size_t quota,
                                   Normalization mode = Normalization::MaxScale) {
  detail::require(scales.size() == quota,
                  "selection has " + std::to_string(scales.size()) +
                      " scales but quota is " + std::to_string(quota));
  ScoreReport report;
  report.quota = quota;
  report.normalization = mode;
  report.prototypicality_score = prototypicality_score(set, scales, mode);
  report.chance_prototypicality = chance_prototypicality(set, quota, mode);
  report.centered_prototypicality =
      report.prototypicality_score - report.chance_prototypicality;
  if (quota >= 2) {
    report.diversity_score = diversity_score(set, scales);
    report.chance_diversity = chance_diversity(set, quota);
    report.centered_diversity = *report.diversity_score - *report.chance_diversity;
  }
  return report;
}

}  // namespace exsel
