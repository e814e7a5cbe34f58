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

// Stimulus sets and the cosine geometry over their embeddings.

#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "exsel/error.hpp"

namespace exsel {

struct Stimulus {
  std::string id;
  double scale = 0.0;
  std::vector<double> embedding;
};

// A category's stimuli on one morph continuum. Construct through
// make_stimulus_set(), which renormalizes embeddings and validates.
class StimulusSet {
 public:
  const std::string& category_name() const { return category_name_; }
  double max_scale() const { return max_scale_; }
  double midpoint_scale() const { return midpoint_scale_; }
  std::size_t size() const { return stimuli_.size(); }
  std::size_t dim() const { return stimuli_.front().embedding.size(); }
  const std::vector<Stimulus>& stimuli() const { return stimuli_; }
  const Stimulus& operator[](std::size_t i) const { return stimuli_[i]; }

  std::vector<double> scales_of(std::span<const std::size_t> indices) const {
    std::vector<double> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) out.push_back(stimuli_.at(i).scale);
    return out;
  }

  // Index of the stimulus whose scale is closest to the midpoint; lower index
  // wins on ties.
  std::size_t midpoint_index() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < stimuli_.size(); ++i) {
      if (std::abs(stimuli_[i].scale - midpoint_scale_) <
          std::abs(stimuli_[best].scale - midpoint_scale_)) {
        best = i;
      }
    }
    return best;
  }

 private:
  friend StimulusSet make_stimulus_set(std::string, double, double,
                                       std::vector<Stimulus>);
  StimulusSet() = default;

  std::string category_name_;
  double max_scale_ = 0.0;
  double midpoint_scale_ = 0.0;
  std::vector<Stimulus> stimuli_;
};

inline constexpr double kUnitNormTolerance = 1e-6;

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += a[k] * b[k];
  return sum;
}

inline void normalize_in_place(Stimulus& s) {
  const double norm = std::sqrt(dot(s.embedding, s.embedding));
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw ValidationError("stimulus '" + s.id +
                          "' has a zero-norm or non-finite embedding");
  }
  for (double& x : s.embedding) x /= norm;
}

}  // namespace detail

inline StimulusSet make_stimulus_set(std::string category_name,
                                     double max_scale, double midpoint_scale,
                                     std::vector<Stimulus> stimuli) {
  using detail::require;
  require(!stimuli.empty(), "stimulus set '" + category_name + "' is empty");
  require(std::isfinite(max_scale) && max_scale > 0.0,
          "max_scale must be positive");
  require(midpoint_scale > 0.0 && midpoint_scale < max_scale,
          "midpoint_scale must lie strictly inside (0, max_scale)");

  const std::size_t dim = stimuli.front().embedding.size();
  require(dim >= 1, "embeddings must have at least one component");

  std::unordered_set<std::string> seen;
  for (Stimulus& s : stimuli) {
    require(seen.insert(s.id).second, "duplicate stimulus id '" + s.id + "'");
    require(s.embedding.size() == dim,
            "stimulus '" + s.id + "' has embedding length " +
                std::to_string(s.embedding.size()) + ", expected " +
                std::to_string(dim));
    require(std::isfinite(s.scale) && s.scale >= 0.0 && s.scale <= max_scale,
            "stimulus '" + s.id + "' scale " + std::to_string(s.scale) +
                " outside [0, " + std::to_string(max_scale) + "]");
    detail::normalize_in_place(s);
  }

  StimulusSet set;
  set.category_name_ = std::move(category_name);
  set.max_scale_ = max_scale;
  set.midpoint_scale_ = midpoint_scale;
  set.stimuli_ = std::move(stimuli);
  return set;
}

// Anything indexable as a square similarity matrix. Objectives are written
// against this so tests can feed transformed views.
template <class M>
concept SimilarityLike = requires(const M& m, std::size_t i, std::size_t j) {
  { m.size() } -> std::convertible_to<std::size_t>;
  { m(i, j) } -> std::convertible_to<double>;
};

// Dense, symmetric cosine similarity matrix with unit diagonal.
class SimilarityMatrix {
 public:
  static constexpr double kDiagonalTolerance = 1e-9;

  // Validates symmetry, unit diagonal and the [-1, 1] range.
  SimilarityMatrix(std::size_t n, std::vector<double> values)
      : n_(n), values_(std::move(values)) {
    using detail::require;
    require(n_ >= 1, "similarity matrix must be nonempty");
    require(values_.size() == n_ * n_, "similarity matrix must be n x n");
    for (std::size_t i = 0; i < n_; ++i) {
      require(std::abs((*this)(i, i) - 1.0) <= kDiagonalTolerance,
              "similarity diagonal must be 1");
      for (std::size_t j = 0; j < n_; ++j) {
        const double v = (*this)(i, j);
        require(v == (*this)(j, i), "similarity matrix must be symmetric");
        require(v >= -1.0 - kDiagonalTolerance && v <= 1.0 + kDiagonalTolerance,
                "similarity entries must lie in [-1, 1]");
      }
    }
  }

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const {
    return values_[i * n_ + j];
  }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * n_, n_};
  }

 private:
  std::size_t n_;
  std::vector<double> values_;
};

// Dot products of the unit embeddings. The upper triangle is computed once and
// mirrored; the diagonal is pinned to 1.
inline SimilarityMatrix similarity_matrix(const StimulusSet& set) {
  const std::size_t n = set.size();
  std::vector<double> values(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    values[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = detail::dot(set[i].embedding, set[j].embedding);
      values[i * n + j] = v;
      values[j * n + i] = v;
    }
  }
  return SimilarityMatrix(n, std::move(values));
}

// Cosine distance 1 - sim(i, j).
template <SimilarityLike M>
double distance(const M& matrix, std::size_t i, std::size_t j) {
  detail::require(i < matrix.size() && j < matrix.size(),
                  "distance index out of range");
  return 1.0 - matrix(i, j);
}

}  // namespace exsel
