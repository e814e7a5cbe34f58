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

// JSON documents: stimulus-set files and the structured records the CLI
// emits. Requires nlohmann/json.

#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <string>

#include "json.hpp"

#include "exsel/compare.hpp"
#include "exsel/embedspace.hpp"
#include "exsel/error.hpp"
#include "exsel/metrics.hpp"
#include "exsel/objectives.hpp"

namespace exsel {

using Json = nlohmann::ordered_json;

// Rounds to 9 significant digits so the shortest round-trip rendering used by
// the JSON writer has at most 9 digits. Negative zero becomes zero.
inline double round_sig9(double x) {
  if (!std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

inline Json rounded_array(std::span<const double> values) {
  Json out = Json::array();
  for (double v : values) out.push_back(round_sig9(v));
  return out;
}

// --- stimulus-set file -----------------------------------------------------
//
// {
//   "category_name": "dax",
//   "max_scale": 90,
//   "midpoint_scale": 45,
//   "stimuli": [ {"id": "dax_000", "scale": 0, "embedding": [..D reals..]}, ... ],
//   "provenance": { ... }            // optional, ignored on load
// }

namespace detail {

inline const Json& field(const Json& doc, const char* key, const std::string& where) {
  require(doc.is_object(), where + " must be an object");
  const auto it = doc.find(key);
  require(it != doc.end(), where + " is missing '" + key + "'");
  return *it;
}

inline double number_field(const Json& doc, const char* key, const std::string& where) {
  const Json& v = field(doc, key, where);
  require(v.is_number(), where + "." + key + " must be a number");
  return v.get<double>();
}

inline std::string string_field(const Json& doc, const char* key, const std::string& where) {
  const Json& v = field(doc, key, where);
  require(v.is_string(), where + "." + key + " must be a string");
  return v.get<std::string>();
}

}  // namespace detail

inline StimulusSet stimulus_set_from_json(const Json& doc) {
  const std::string name = detail::string_field(doc, "category_name", "stimulus set");
  const double max_scale = detail::number_field(doc, "max_scale", "stimulus set");
  const double midpoint = detail::number_field(doc, "midpoint_scale", "stimulus set");
  const Json& list = detail::field(doc, "stimuli", "stimulus set");
  detail::require(list.is_array(), "stimulus set.stimuli must be an array");

  std::vector<Stimulus> stimuli;
  stimuli.reserve(list.size());
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string where = "stimuli[" + std::to_string(i) + "]";
    Stimulus s;
    s.id = detail::string_field(list[i], "id", where);
    s.scale = detail::number_field(list[i], "scale", where);
    const Json& emb = detail::field(list[i], "embedding", where);
    detail::require(emb.is_array(), where + ".embedding must be an array");
    for (const Json& x : emb) {
      detail::require(x.is_number(), where + ".embedding must hold numbers");
      s.embedding.push_back(x.get<double>());
    }
    stimuli.push_back(std::move(s));
  }
  return make_stimulus_set(name, max_scale, midpoint, std::move(stimuli));
}

inline StimulusSet load_stimulus_set(std::istream& in) {
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError(std::string("malformed stimulus-set document: ") + e.what());
  }
  return stimulus_set_from_json(doc);
}

inline StimulusSet load_stimulus_set(const std::filesystem::path& path) {
  std::ifstream in(path);
  detail::require(in.good(), "cannot open " + path.string());
  try {
    return load_stimulus_set(in);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

// Embeddings are written at full round-trip precision.
inline Json to_json(const StimulusSet& set, const Json& provenance = nullptr) {
  Json doc;
  doc["category_name"] = set.category_name();
  doc["max_scale"] = set.max_scale();
  doc["midpoint_scale"] = set.midpoint_scale();
  Json list = Json::array();
  for (const Stimulus& s : set.stimuli()) {
    list.push_back({{"id", s.id}, {"scale", s.scale}, {"embedding", s.embedding}});
  }
  doc["stimuli"] = std::move(list);
  if (!provenance.is_null()) doc["provenance"] = provenance;
  return doc;
}

// --- records ---------------------------------------------------------------

inline Json to_json(const Selection& sel, const StimulusSet& set) {
  Json ids = Json::array();
  for (std::size_t i : sel.indices) ids.push_back(set[i].id);
  return {
      {"category", set.category_name()},
      {"criterion", to_string(sel.criterion.kind)},
      {"lambda", round_sig9(sel.criterion.lambda)},
      {"quota", sel.indices.size()},
      {"solver", to_string(sel.solver)},
      {"indices", sel.indices},
      {"ids", std::move(ids)},
      {"scales", rounded_array(set.scales_of(sel.indices))},
      {"objective_value", round_sig9(sel.objective_value)},
  };
}

inline Json to_json(const ScoreReport& r) {
  auto opt = [](const std::optional<double>& v) -> Json {
    return v ? Json(round_sig9(*v)) : Json(nullptr);
  };
  return {
      {"quota", r.quota},
      {"normalization", to_string(r.normalization)},
      {"prototypicality_score", round_sig9(r.prototypicality_score)},
      {"chance_prototypicality", round_sig9(r.chance_prototypicality)},
      {"centered_prototypicality", round_sig9(r.centered_prototypicality)},
      {"diversity_score", opt(r.diversity_score)},
      {"chance_diversity", opt(r.chance_diversity)},
      {"centered_diversity", opt(r.centered_diversity)},
  };
}

inline Json to_json(const AlignmentReport& r) {
  Json cells = Json::array();
  for (const auto& [key, mae] : r.cells) {
    cells.push_back({{"criterion", criterion_label(key.criterion)},
                     {"quota", key.quota},
                     {"metric", to_string(key.metric)},
                     {"mae", round_sig9(mae)}});
  }
  Json aggregate = Json::array();
  for (const auto& [key, mae] : r.aggregate) {
    aggregate.push_back({{"criterion", criterion_label(key.criterion)},
                         {"metric", to_string(key.metric)},
                         {"mae", round_sig9(mae)}});
  }
  return {{"normalization", to_string(r.normalization)},
          {"cells", std::move(cells)},
          {"aggregate", std::move(aggregate)}};
}

}  // namespace exsel
