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

// Selection criteria over a similarity matrix and the solvers that maximize
// them under a cardinality quota.
//
//   representativity(S) = sum_i max_{j in S} sim(i, j)     (facility location)
//   diversity(S)        = sum_{i<j in S} (1 - sim(i, j))   (max-sum dispersion)
//   combined(S)         = representativity(S) + lambda * diversity(S)
//
// Prototypicality is not a set function in the same sense: stimuli are ranked
// by mean similarity to the whole set and the top M are taken.

#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "exsel/embedspace.hpp"
#include "exsel/error.hpp"

namespace exsel {

enum class CriterionKind { Prototypicality, Representativity, Diversity, Combined };
enum class SolverKind { Exact, Greedy };

struct Criterion {
  CriterionKind kind = CriterionKind::Representativity;
  double lambda = 1.0;  // weight on the diversity term; Combined only

  static Criterion prototypicality() { return {CriterionKind::Prototypicality}; }
  static Criterion representativity() { return {CriterionKind::Representativity}; }
  static Criterion diversity() { return {CriterionKind::Diversity}; }
  static Criterion combined(double lambda = 1.0) {
    detail::require(lambda >= 0.0, "lambda must be nonnegative");
    return {CriterionKind::Combined, lambda};
  }

  friend auto operator<=>(const Criterion&, const Criterion&) = default;
};

inline constexpr std::string_view to_string(CriterionKind kind) {
  switch (kind) {
    case CriterionKind::Prototypicality: return "prototypicality";
    case CriterionKind::Representativity: return "representativity";
    case CriterionKind::Diversity: return "diversity";
    case CriterionKind::Combined: return "combined";
  }
  return "unknown";
}

inline constexpr std::string_view to_string(SolverKind kind) {
  return kind == SolverKind::Exact ? "exact" : "greedy";
}

inline CriterionKind parse_criterion_kind(std::string_view name) {
  for (auto kind : {CriterionKind::Prototypicality, CriterionKind::Representativity,
                    CriterionKind::Diversity, CriterionKind::Combined}) {
    if (name == to_string(kind)) return kind;
  }
  throw ValidationError("unknown criterion '" + std::string(name) + "'");
}

inline SolverKind parse_solver_kind(std::string_view name) {
  if (name == "exact") return SolverKind::Exact;
  if (name == "greedy") return SolverKind::Greedy;
  throw ValidationError("unknown solver '" + std::string(name) + "'");
}

struct Selection {
  std::vector<std::size_t> indices;  // strictly increasing
  Criterion criterion;
  SolverKind solver = SolverKind::Exact;
  double objective_value = 0.0;
};

// Objective values closer than this are treated as ties.
inline constexpr double kObjectiveTolerance = 1e-9;
inline constexpr std::uint64_t kDefaultEnumerationBudget = 1'000'000;
inline constexpr int kMaxSwapSweeps = 1000;

namespace detail {

inline void check_quota(std::size_t quota, std::size_t n) {
  require(quota >= 1 && quota <= n,
          "quota " + std::to_string(quota) + " outside [1, " +
              std::to_string(n) + "]");
}

inline void check_subset(std::span<const std::size_t> subset, std::size_t n) {
  for (std::size_t j : subset) {
    require(j < n, "subset index " + std::to_string(j) + " out of range");
  }
}

// C(n, k), saturating at UINT64_MAX.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result > std::numeric_limits<std::uint64_t>::max()) {
      return std::numeric_limits<std::uint64_t>::max();
    }
  }
  return static_cast<std::uint64_t>(result);
}

// Advances a strictly increasing k-combination of {0..n-1} to its
// lexicographic successor. Returns false after the last one.
inline bool next_combination(std::vector<std::size_t>& comb, std::size_t n) {
  const std::size_t k = comb.size();
  std::size_t i = k;
  while (i > 0) {
    --i;
    if (comb[i] < n - k + i) {
      ++comb[i];
      for (std::size_t j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace detail

// Mean similarity of every stimulus to all n stimuli, self included.
template <SimilarityLike M>
std::vector<double> mean_similarities(const M& matrix) {
  const std::size_t n = matrix.size();
  std::vector<double> means(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += matrix(i, j);
    means[i] = sum / static_cast<double>(n);
  }
  return means;
}

template <SimilarityLike M>
double representativity(const M& matrix, std::span<const std::size_t> subset) {
  detail::require(!subset.empty(), "representativity of an empty subset");
  detail::check_subset(subset, matrix.size());
  double total = 0.0;
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j : subset) best = std::max(best, static_cast<double>(matrix(i, j)));
    total += best;
  }
  return total;
}

template <SimilarityLike M>
double diversity(const M& matrix, std::span<const std::size_t> subset) {
  detail::check_subset(subset, matrix.size());
  double total = 0.0;
  for (std::size_t a = 0; a < subset.size(); ++a) {
    for (std::size_t b = a + 1; b < subset.size(); ++b) {
      total += 1.0 - matrix(subset[a], subset[b]);
    }
  }
  return total;
}

template <SimilarityLike M>
double combined(const M& matrix, std::span<const std::size_t> subset,
                double lambda = 1.0) {
  detail::require(lambda >= 0.0, "lambda must be nonnegative");
  return representativity(matrix, subset) + lambda * diversity(matrix, subset);
}

// Sum of the selected stimuli's mean similarities.
template <SimilarityLike M>
double prototypicality(const M& matrix, std::span<const std::size_t> subset) {
  detail::require(!subset.empty(), "prototypicality of an empty subset");
  detail::check_subset(subset, matrix.size());
  const auto means = mean_similarities(matrix);
  double total = 0.0;
  for (std::size_t j : subset) total += means[j];
  return total;
}

template <SimilarityLike M>
double evaluate(const M& matrix, const Criterion& criterion,
                std::span<const std::size_t> subset) {
  switch (criterion.kind) {
    case CriterionKind::Prototypicality: return prototypicality(matrix, subset);
    case CriterionKind::Representativity: return representativity(matrix, subset);
    case CriterionKind::Diversity: return diversity(matrix, subset);
    case CriterionKind::Combined: return combined(matrix, subset, criterion.lambda);
  }
  return 0.0;
}

// Top-M stimuli by mean similarity. Among index sets whose summed means are
// within kObjectiveTolerance of the best, the lexicographically smallest is
// returned, which reduces to "lower index first" on exact ties.
template <SimilarityLike M>
Selection prototypicality_rank(const M& matrix, std::size_t quota) {
  const std::size_t n = matrix.size();
  detail::check_quota(quota, n);
  const auto means = mean_similarities(matrix);

  std::vector<double> sorted = means;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double best_sum = 0.0;
  for (std::size_t k = 0; k < quota; ++k) best_sum += sorted[k];
  const double target = best_sum - kObjectiveTolerance;

  // Fill positions left to right with the smallest index that still admits a
  // completion reaching the target. suffix_top[i] is the sum of the `remaining`
  // largest means among indices >= i.
  std::vector<std::size_t> chosen;
  chosen.reserve(quota);
  double partial = 0.0;
  std::size_t start = 0;
  for (std::size_t pos = 0; pos < quota; ++pos) {
    const std::size_t remaining = quota - pos - 1;
    std::vector<double> suffix_top(n + 1, 0.0);
    std::priority_queue<double, std::vector<double>, std::greater<>> heap;
    double heap_sum = 0.0;
    for (std::size_t i = n; i-- > start;) {
      suffix_top[i + 1] = heap_sum;
      if (remaining == 0) continue;
      if (heap.size() < remaining) {
        heap.push(means[i]);
        heap_sum += means[i];
      } else if (means[i] > heap.top()) {
        heap_sum += means[i] - heap.top();
        heap.pop();
        heap.push(means[i]);
      }
    }
    std::size_t pick = n;
    for (std::size_t i = start; i + remaining < n; ++i) {
      // The completion must draw `remaining` indices above i.
      if (partial + means[i] + suffix_top[i + 1] >= target) {
        pick = i;
        break;
      }
    }
    // Unreachable unless the means are non-finite.
    detail::require(pick < n, "prototypicality ranking failed");
    chosen.push_back(pick);
    partial += means[pick];
    start = pick + 1;
  }

  double objective = 0.0;
  for (std::size_t j : chosen) objective += means[j];
  return {std::move(chosen), Criterion::prototypicality(), SolverKind::Exact,
          objective};
}

// Global maximizer by enumerating all C(n, M) index sets in lexicographic
// order. Ties within kObjectiveTolerance of the maximum resolve to the
// lexicographically smallest set.
template <SimilarityLike M>
Selection solve_exact(const M& matrix, const Criterion& criterion,
                      std::size_t quota,
                      std::uint64_t budget = kDefaultEnumerationBudget) {
  const std::size_t n = matrix.size();
  detail::check_quota(quota, n);
  if (criterion.kind == CriterionKind::Prototypicality) {
    return prototypicality_rank(matrix, quota);
  }
  const std::uint64_t count = detail::binomial(n, quota);
  if (count > budget) {
    throw BudgetExceeded("C(" + std::to_string(n) + ", " +
                         std::to_string(quota) + ") = " + std::to_string(count) +
                         " subsets exceeds the enumeration budget of " +
                         std::to_string(budget) + "; use the greedy solver");
  }

  std::vector<double> values;
  values.reserve(count);
  std::vector<std::size_t> comb(quota);
  for (std::size_t k = 0; k < quota; ++k) comb[k] = k;
  double best = -std::numeric_limits<double>::infinity();
  do {
    const double v = evaluate(matrix, criterion, comb);
    values.push_back(v);
    best = std::max(best, v);
  } while (detail::next_combination(comb, n));

  // Second pass: first set, in lexicographic order, within tolerance of the
  // maximum. This is independent of how the first pass was partitioned.
  for (std::size_t k = 0; k < quota; ++k) comb[k] = k;
  std::size_t rank = 0;
  while (values[rank] < best - kObjectiveTolerance) {
    detail::next_combination(comb, n);
    ++rank;
  }
  return {comb, criterion, SolverKind::Exact, values[rank]};
}

namespace detail {

// Lazy greedy for facility location. Marginal gains are kept in a max-heap
// and only the top entry is refreshed before acceptance; submodularity makes
// stale gains valid upper bounds.
template <SimilarityLike M>
std::vector<std::size_t> lazy_greedy_representativity(const M& matrix,
                                                       std::size_t quota) {
  const std::size_t n = matrix.size();
  // Coverage starts at the cosine floor so every gain is a shifted objective
  // increment: the first step maximizes representativity({j}) + n.
  std::vector<double> coverage(n, -1.0);
  auto gain_of = [&](std::size_t j) {
    double g = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      g += std::max(0.0, static_cast<double>(matrix(i, j)) - coverage[i]);
    }
    return g;
  };

  struct Entry {
    double gain;
    std::size_t index;
    std::size_t round;  // selection size when the gain was computed
  };
  auto less = [](const Entry& a, const Entry& b) {
    if (a.gain != b.gain) return a.gain < b.gain;
    return a.index > b.index;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(less)> heap(less);
  for (std::size_t j = 0; j < n; ++j) heap.push({gain_of(j), j, 0});

  std::vector<std::size_t> chosen;
  while (chosen.size() < quota) {
    Entry top = heap.top();
    heap.pop();
    if (top.round != chosen.size()) {
      heap.push({gain_of(top.index), top.index, chosen.size()});
      continue;
    }
    chosen.push_back(top.index);
    for (std::size_t i = 0; i < n; ++i) {
      coverage[i] = std::max(coverage[i], static_cast<double>(matrix(i, top.index)));
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

// Seed, grow by best marginal value, then single-swap local search.
template <SimilarityLike M>
std::vector<std::size_t> greedy_swap(const M& matrix, const Criterion& criterion,
                                     std::size_t quota) {
  const std::size_t n = matrix.size();
  auto value = [&](std::vector<std::size_t> s) {
    std::sort(s.begin(), s.end());
    return evaluate(matrix, criterion, s);
  };

  std::vector<std::size_t> current;
  if (quota >= 2) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        const double v = value({a, b});
        if (v > best + kObjectiveTolerance) {
          best = v;
          current = {a, b};
        }
      }
    }
  } else {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < n; ++a) {
      const double v = value({a});
      if (v > best + kObjectiveTolerance) {
        best = v;
        current = {a};
      }
    }
  }

  std::vector<char> in_set(n, 0);
  for (std::size_t j : current) in_set[j] = 1;
  while (current.size() < quota) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t pick = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (in_set[j]) continue;
      auto trial = current;
      trial.push_back(j);
      const double v = value(trial);
      if (v > best + kObjectiveTolerance) {
        best = v;
        pick = j;
      }
    }
    current.push_back(pick);
    in_set[pick] = 1;
  }

  double current_value = value(current);
  for (int sweep = 0; sweep < kMaxSwapSweeps; ++sweep) {
    double best = current_value;
    std::size_t out_pos = quota;
    std::size_t in_index = n;
    for (std::size_t pos = 0; pos < quota; ++pos) {
      for (std::size_t j = 0; j < n; ++j) {
        if (in_set[j]) continue;
        auto trial = current;
        trial[pos] = j;
        const double v = value(trial);
        if (v > best + kObjectiveTolerance) {
          best = v;
          out_pos = pos;
          in_index = j;
        }
      }
    }
    if (in_index == n) break;
    in_set[current[out_pos]] = 0;
    in_set[in_index] = 1;
    current[out_pos] = in_index;
    current_value = best;
  }
  std::sort(current.begin(), current.end());
  return current;
}

}  // namespace detail

// Scalable heuristic companion to solve_exact. Representativity gets the
// (1 - 1/e) lazy-greedy guarantee; Diversity and Combined are not submodular
// and carry no guarantee.
template <SimilarityLike M>
Selection solve_greedy(const M& matrix, const Criterion& criterion,
                       std::size_t quota) {
  detail::check_quota(quota, matrix.size());
  std::vector<std::size_t> indices;
  switch (criterion.kind) {
    case CriterionKind::Prototypicality: {
      Selection s = prototypicality_rank(matrix, quota);
      s.solver = SolverKind::Greedy;
      return s;
    }
    case CriterionKind::Representativity:
      indices = detail::lazy_greedy_representativity(matrix, quota);
      break;
    case CriterionKind::Diversity:
    case CriterionKind::Combined:
      indices = detail::greedy_swap(matrix, criterion, quota);
      break;
  }
  const double objective = evaluate(matrix, criterion, indices);
  return {std::move(indices), criterion, SolverKind::Greedy, objective};
}

template <SimilarityLike M>
Selection solve(const M& matrix, const Criterion& criterion, std::size_t quota,
                SolverKind solver,
                std::uint64_t budget = kDefaultEnumerationBudget) {
  return solver == SolverKind::Exact ? solve_exact(matrix, criterion, quota, budget)
                                     : solve_greedy(matrix, criterion, quota);
}

}  // namespace exsel
