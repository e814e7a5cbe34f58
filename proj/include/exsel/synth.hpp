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

// Synthetic morph continua. Scale t in [0, 1] is placed on a geodesic arc
// between two orthonormal anchors u and v:
//
//   f(t) = cos(c * t) u + sin(c * t) v,   so   sim(t_a, t_b) = cos(c |t_a - t_b|)
//
// which gives a similarity-to-midpoint profile that is unimodal, symmetric
// about t = 0.5 and strictly decreasing toward both endpoints for c <= pi.

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "exsel/embedspace.hpp"
#include "exsel/error.hpp"

namespace exsel {

struct SynthSpec {
  std::string category_name = "synthetic";
  std::size_t n_stimuli = 19;
  std::size_t dim = 8;
  double max_scale = 90.0;
  double midpoint_scale = 45.0;
  double curvature = std::numbers::pi / 2;  // arc length between endpoints
  std::uint64_t seed = 0;
  double noise = 0.0;  // expected norm of the isotropic perturbation
};

namespace detail {

// std::normal_distribution differs across standard libraries; this keeps
// generated files byte-identical everywhere.
class PortableGaussian {
 public:
  explicit PortableGaussian(std::uint64_t seed) : engine_(seed) {}

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline void validate(const SynthSpec& spec) {
  require(!spec.category_name.empty(), "synth category name is empty");
  require(spec.n_stimuli >= 2, "synth needs at least two stimuli");
  require(spec.dim >= 2, "synth dimension must be at least 2");
  require(std::isfinite(spec.max_scale) && spec.max_scale > 0.0,
          "synth max_scale must be positive");
  require(spec.midpoint_scale > 0.0 && spec.midpoint_scale < spec.max_scale,
          "synth midpoint_scale must lie inside (0, max_scale)");
  require(spec.curvature > 0.0 && spec.curvature <= std::numbers::pi,
          "synth curvature must lie in (0, pi]");
  require(std::isfinite(spec.noise) && spec.noise >= 0.0,
          "synth noise must be nonnegative");
}

}  // namespace detail

inline StimulusSet generate(const SynthSpec& spec) {
  detail::validate(spec);
  detail::PortableGaussian gauss(spec.seed);

  std::vector<double> u(spec.dim), v(spec.dim);
  for (double& x : u) x = gauss();
  for (double& x : v) x = gauss();
  auto normalize = [](std::vector<double>& w) {
    const double norm = std::sqrt(detail::dot(w, w));
    for (double& x : w) x /= norm;
  };
  normalize(u);
  const double proj = detail::dot(u, v);
  for (std::size_t k = 0; k < spec.dim; ++k) v[k] -= proj * u[k];
  normalize(v);

  const double noise_sd = spec.noise / std::sqrt(static_cast<double>(spec.dim));
  std::vector<Stimulus> stimuli;
  stimuli.reserve(spec.n_stimuli);
  const double steps = static_cast<double>(spec.n_stimuli - 1);
  for (std::size_t i = 0; i < spec.n_stimuli; ++i) {
    const double t = static_cast<double>(i) / steps;
    const double angle = spec.curvature * t;
    Stimulus s;
    char id[64];
    std::snprintf(id, sizeof id, "%s_%03zu", spec.category_name.c_str(), i);
    s.id = id;
    s.scale = spec.max_scale * static_cast<double>(i) / steps;
    s.embedding.resize(spec.dim);
    for (std::size_t k = 0; k < spec.dim; ++k) {
      s.embedding[k] = std::cos(angle) * u[k] + std::sin(angle) * v[k];
    }
    if (spec.noise > 0.0) {
      for (double& x : s.embedding) x += noise_sd * gauss();
    }
    stimuli.push_back(std::move(s));
  }
  return make_stimulus_set(spec.category_name, spec.max_scale,
                           spec.midpoint_scale, std::move(stimuli));
}

// Three categories on a grid of 5 scale units: dax and vep over 0..90 (19
// stimuli), bem over 0..100 (21 stimuli). Each category draws its anchors
// from seed + its position.
inline std::vector<SynthSpec> default_fixture(std::uint64_t seed = 0,
                                              double noise = 0.0) {
  std::vector<SynthSpec> specs;
  const struct {
    const char* name;
    std::size_t n;
    double max_scale;
  } rows[] = {{"dax", 19, 90.0}, {"vep", 19, 90.0}, {"bem", 21, 100.0}};
  std::uint64_t offset = 0;
  for (const auto& row : rows) {
    SynthSpec spec;
    spec.category_name = row.name;
    spec.n_stimuli = row.n;
    spec.max_scale = row.max_scale;
    spec.midpoint_scale = row.max_scale / 2.0;
    spec.seed = seed + offset++;
    spec.noise = noise;
    specs.push_back(spec);
  }
  return specs;
}

}  // namespace exsel
