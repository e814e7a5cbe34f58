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

// Model/human alignment: human trial ingestion, modal human choices, and the
// mean-absolute-error comparison of model and participant scores.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <istream>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "exsel/embedspace.hpp"
#include "exsel/error.hpp"
#include "exsel/metrics.hpp"
#include "exsel/objectives.hpp"

namespace exsel {

using CategoryMap = std::map<std::string, StimulusSet, std::less<>>;

inline CategoryMap make_category_map(std::vector<StimulusSet> sets) {
  CategoryMap out;
  for (StimulusSet& s : sets) {
    std::string name = s.category_name();
    detail::require(out.emplace(name, std::move(s)).second,
                    "category '" + name + "' given more than once");
  }
  return out;
}

inline constexpr std::size_t kMaxHumanQuota = 3;
inline constexpr std::string_view kHumanTrialsHeader =
    "participant_id,category,quota,scales";

struct HumanTrial {
  std::string participant_id;
  std::string category_name;
  std::size_t quota = 0;
  std::vector<double> selected_scales;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
bool parse_number(std::string_view text, T& out) {
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace detail

// Parses the human-selections table. An empty stream (or a header alone)
// yields no trials.
inline std::vector<HumanTrial> load_human_trials(std::istream& in,
                                                 const CategoryMap& categories) {
  using detail::require;
  std::vector<HumanTrial> trials;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = detail::trim(line);
    if (row.empty()) continue;
    const std::string where = "human trials line " + std::to_string(line_no);
    if (!header_seen) {
      require(row == kHumanTrialsHeader,
              where + ": expected header '" + std::string(kHumanTrialsHeader) + "'");
      header_seen = true;
      continue;
    }
    const auto fields = detail::split(row, ',');
    require(fields.size() == 4, where + ": expected 4 fields");

    HumanTrial trial;
    trial.participant_id = std::string(fields[0]);
    trial.category_name = std::string(fields[1]);
    require(!trial.participant_id.empty(), where + ": empty participant_id");
    require(detail::parse_number(fields[2], trial.quota) && trial.quota >= 1 &&
                trial.quota <= kMaxHumanQuota,
            where + ": quota must be an integer in [1, 3]");
    const auto it = categories.find(trial.category_name);
    require(it != categories.end(),
            where + ": unknown category '" + trial.category_name + "'");
    for (std::string_view part : detail::split(fields[3], ';')) {
      double v = 0.0;
      require(detail::parse_number(part, v), where + ": malformed scale '" +
                                                 std::string(part) + "'");
      trial.selected_scales.push_back(v);
    }
    require(trial.selected_scales.size() == trial.quota,
            where + ": quota " + std::to_string(trial.quota) + " but " +
                std::to_string(trial.selected_scales.size()) + " scales");
    detail::check_scales(it->second, trial.selected_scales);
    trials.push_back(std::move(trial));
  }
  return trials;
}

// Most frequent selection (as a sorted scale multiset) for one condition.
// Ties go to the lexicographically smallest sorted tuple.
inline std::vector<double> modal_choice(std::span<const HumanTrial> trials,
                                        std::string_view category,
                                        std::size_t quota) {
  std::map<std::vector<double>, std::size_t> counts;
  for (const HumanTrial& t : trials) {
    if (t.category_name != category || t.quota != quota) continue;
    auto key = t.selected_scales;
    std::sort(key.begin(), key.end());
    ++counts[key];
  }
  detail::require(!counts.empty(), "no human trials for category '" +
                                       std::string(category) + "' at quota " +
                                       std::to_string(quota));
  auto best = counts.begin();
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

// Per-category modal choice, each divided by its category's max scale, then
// averaged position-wise across the categories that have trials at `quota`.
inline std::vector<double> normalized_modal_choice(std::span<const HumanTrial> trials,
                                                   const CategoryMap& categories,
                                                   std::size_t quota) {
  std::vector<double> sum(quota, 0.0);
  std::size_t used = 0;
  for (const auto& [name, set] : categories) {
    const bool present = std::any_of(trials.begin(), trials.end(), [&](const HumanTrial& t) {
      return t.category_name == name && t.quota == quota;
    });
    if (!present) continue;
    const auto mode = modal_choice(trials, name, quota);
    for (std::size_t k = 0; k < quota; ++k) sum[k] += mode[k] / set.max_scale();
    ++used;
  }
  detail::require(used > 0, "no human trials at quota " + std::to_string(quota));
  for (double& v : sum) v /= static_cast<double>(used);
  return sum;
}

enum class AlignmentMetric { Prototypicality, Diversity, AvgBoth };

inline constexpr std::string_view to_string(AlignmentMetric m) {
  switch (m) {
    case AlignmentMetric::Prototypicality: return "prototypicality";
    case AlignmentMetric::Diversity: return "diversity";
    case AlignmentMetric::AvgBoth: return "avg_both";
  }
  return "unknown";
}

// "combined" alone when lambda is the default 1.
inline std::string criterion_label(const Criterion& c) {
  std::string label(to_string(c.kind));
  if (c.kind == CriterionKind::Combined && c.lambda != 1.0) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "[lambda=%g]", c.lambda);
    label += buf;
  }
  return label;
}

struct ModelKey {
  Criterion criterion;
  std::string category;
  std::size_t quota = 0;
  friend auto operator<=>(const ModelKey&, const ModelKey&) = default;
};

// Scales chosen by a model for each (criterion, category, quota) condition.
using ModelSelections = std::map<ModelKey, std::vector<double>>;

struct AlignmentCell {
  Criterion criterion;
  std::size_t quota = 0;
  AlignmentMetric metric = AlignmentMetric::Prototypicality;
  friend auto operator<=>(const AlignmentCell&, const AlignmentCell&) = default;
};

struct AlignmentAggregate {
  Criterion criterion;
  AlignmentMetric metric = AlignmentMetric::Prototypicality;
  friend auto operator<=>(const AlignmentAggregate&, const AlignmentAggregate&) = default;
};

struct AlignmentReport {
  Normalization normalization = Normalization::MaxScale;
  std::map<AlignmentCell, double> cells;
  std::map<AlignmentAggregate, double> aggregate;

  std::vector<Criterion> criteria() const {
    std::set<Criterion> seen;
    for (const auto& [key, _] : aggregate) seen.insert(key.criterion);
    return {seen.begin(), seen.end()};
  }
  std::vector<std::size_t> quotas() const {
    std::set<std::size_t> seen;
    for (const auto& [key, _] : cells) seen.insert(key.quota);
    return {seen.begin(), seen.end()};
  }
};

// For every criterion with model selections, the mean over trials of
// |model score - participant score|. Every trial weighs equally regardless of
// category. Per-quota cells pool categories; aggregates pool quotas, and
// diversity only ever sees quota >= 2 trials. AvgBoth is the mean of the
// prototypicality and diversity errors at the same level.
inline AlignmentReport mae_alignment(const ModelSelections& models,
                                     std::span<const HumanTrial> trials,
                                     const CategoryMap& categories,
                                     Normalization mode = Normalization::MaxScale) {
  struct Accumulator {
    double sum = 0.0;
    std::size_t count = 0;
    void add(double v) { sum += v; ++count; }
    double mean() const { return sum / static_cast<double>(count); }
  };

  std::set<Criterion> criteria;
  for (const auto& [key, _] : models) criteria.insert(key.criterion);

  AlignmentReport report;
  report.normalization = mode;
  for (const Criterion& criterion : criteria) {
    std::map<std::size_t, Accumulator> proto_by_quota, div_by_quota;
    Accumulator proto_all, div_all;
    for (const HumanTrial& t : trials) {
      const auto cat = categories.find(t.category_name);
      detail::require(cat != categories.end(),
                      "unknown category '" + t.category_name + "'");
      const auto model = models.find({criterion, t.category_name, t.quota});
      detail::require(model != models.end(),
                      "no " + criterion_label(criterion) + " model selection for " +
                          t.category_name + " at quota " + std::to_string(t.quota));
      detail::require(model->second.size() == t.quota,
                      "model selection size does not match quota");
      const StimulusSet& set = cat->second;

      const double proto_err =
          std::abs(prototypicality_score(set, model->second, mode) -
                   prototypicality_score(set, t.selected_scales, mode));
      proto_by_quota[t.quota].add(proto_err);
      proto_all.add(proto_err);
      if (t.quota >= 2) {
        const double div_err = std::abs(diversity_score(set, model->second) -
                                        diversity_score(set, t.selected_scales));
        div_by_quota[t.quota].add(div_err);
        div_all.add(div_err);
      }
    }

    for (const auto& [quota, acc] : proto_by_quota) {
      report.cells[{criterion, quota, AlignmentMetric::Prototypicality}] = acc.mean();
      if (auto d = div_by_quota.find(quota); d != div_by_quota.end()) {
        report.cells[{criterion, quota, AlignmentMetric::Diversity}] = d->second.mean();
        report.cells[{criterion, quota, AlignmentMetric::AvgBoth}] =
            (acc.mean() + d->second.mean()) / 2.0;
      }
    }
    if (proto_all.count > 0) {
      report.aggregate[{criterion, AlignmentMetric::Prototypicality}] = proto_all.mean();
    }
    if (div_all.count > 0) {
      report.aggregate[{criterion, AlignmentMetric::Diversity}] = div_all.mean();
      report.aggregate[{criterion, AlignmentMetric::AvgBoth}] =
          (proto_all.mean() + div_all.mean()) / 2.0;
    }
  }
  return report;
}

// Plain-text table: one panel per metric, quotas down, criteria across.
inline std::string format_alignment_table(const AlignmentReport& report) {
  const auto criteria = report.criteria();
  const auto quotas = report.quotas();
  std::ostringstream out;
  char buf[64];
  auto header = [&] {
    std::snprintf(buf, sizeof buf, "%-7s", "Quota");
    out << buf;
    for (const Criterion& c : criteria) {
      std::snprintf(buf, sizeof buf, " %18s", criterion_label(c).c_str());
      out << buf;
    }
    out << '\n';
  };
  auto panel = [&](AlignmentMetric metric, std::string_view title) {
    out << title << '\n';
    header();
    for (std::size_t q : quotas) {
      bool any = false;
      std::string row;
      std::snprintf(buf, sizeof buf, "%-7zu", q);
      row += buf;
      for (const Criterion& c : criteria) {
        const auto it = report.cells.find({c, q, metric});
        if (it == report.cells.end()) {
          std::snprintf(buf, sizeof buf, " %18s", "-");
        } else {
          std::snprintf(buf, sizeof buf, " %18.3f", it->second);
          any = true;
        }
        row += buf;
      }
      if (any) out << row << '\n';
    }
    std::snprintf(buf, sizeof buf, "%-7s", "all");
    out << buf;
    for (const Criterion& c : criteria) {
      const auto it = report.aggregate.find({c, metric});
      if (it == report.aggregate.end()) {
        std::snprintf(buf, sizeof buf, " %18s", "-");
      } else {
        std::snprintf(buf, sizeof buf, " %18.3f", it->second);
      }
      out << buf;
    }
    out << "\n\n";
  };
  panel(AlignmentMetric::Prototypicality, "Prototypicality score MAE");
  panel(AlignmentMetric::Diversity, "Diversity score MAE");
  panel(AlignmentMetric::AvgBoth, "Average prototypicality + diversity MAE");
  return out.str();
}

}  // namespace exsel
