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

// exsel: synth | select | score | baseline | compare | report
//
// Exit codes: 0 success, 1 validation error, 2 enumeration budget exceeded.
// Failures print {"error": {"kind": ..., "message": ...}} on stderr.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "exsel/exsel.hpp"
#include "exsel/io.hpp"

namespace fs = std::filesystem;

namespace {

constexpr const char* kToolVersion = "1.0.0";

struct RunConfig {
  std::string command;
  std::vector<std::string> inputs;
  std::string output;
  std::vector<std::string> criteria{"prototypicality", "representativity",
                                    "diversity", "combined"};
  std::vector<std::size_t> quotas{1, 2, 3};
  std::string solver = "exact";
  std::string normalization = "max-scale";
  double lambda = 1.0;
  std::uint64_t seed = 0;
  double noise = 0.0;
  std::string human;
  std::string selections;
};

exsel::Json provenance(const RunConfig& c) {
  return {
      {"tool", "exsel"},
      {"version", kToolVersion},
      {"command", c.command},
      {"inputs", c.inputs},
      {"criteria", c.criteria},
      {"quotas", c.quotas},
      {"solver", c.solver},
      {"normalization", c.normalization},
      {"lambda", exsel::round_sig9(c.lambda)},
      {"seed", c.seed},
      {"noise", exsel::round_sig9(c.noise)},
      {"human", c.human},
      {"selections", c.selections},
  };
}

// Collects writes and publishes them together: every file goes to a temporary
// sibling first and is renamed only after all writes succeeded.
class OutputBatch {
 public:
  void add(fs::path path, std::string content) {
    files_.emplace_back(std::move(path), std::move(content));
  }
  void add_json(fs::path path, const exsel::Json& doc) {
    add(std::move(path), doc.dump(2) + "\n");
  }

  void commit() {
    std::vector<fs::path> temps;
    try {
      for (const auto& [path, content] : files_) {
        if (path.has_parent_path()) fs::create_directories(path.parent_path());
        fs::path tmp = path;
        tmp += ".tmp";
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        out.close();
        temps.push_back(tmp);
        if (!out) throw exsel::ValidationError("cannot write " + path.string());
      }
    } catch (...) {
      std::error_code ec;
      for (const auto& t : temps) fs::remove(t, ec);
      throw;
    }
    for (std::size_t i = 0; i < files_.size(); ++i) {
      fs::rename(temps[i], files_[i].first);
    }
  }

 private:
  std::vector<std::pair<fs::path, std::string>> files_;
};

fs::path sibling_text_path(const fs::path& output) {
  fs::path out = output;
  if (out.extension() == ".json") return out.replace_extension(".txt");
  out += ".txt";
  return out;
}

// Directories expand to their *.json files in name order.
exsel::CategoryMap load_categories(const std::vector<std::string>& inputs) {
  exsel::detail::require(!inputs.empty(), "--input is required");
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    const fs::path p(in);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
          found.push_back(entry.path());
        }
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(p);
    }
  }
  exsel::detail::require(!files.empty(), "no stimulus-set files found");
  std::vector<exsel::StimulusSet> sets;
  for (const auto& f : files) sets.push_back(exsel::load_stimulus_set(f));
  return exsel::make_category_map(std::move(sets));
}

std::vector<exsel::Criterion> parse_criteria(const RunConfig& c) {
  std::vector<exsel::Criterion> out;
  for (const auto& name : c.criteria) {
    const auto kind = exsel::parse_criterion_kind(name);
    out.push_back(kind == exsel::CriterionKind::Combined
                      ? exsel::Criterion::combined(c.lambda)
                      : exsel::Criterion{kind});
  }
  return out;
}

std::vector<exsel::HumanTrial> load_trials(const std::string& path,
                                           const exsel::CategoryMap& categories) {
  std::ifstream in(path);
  exsel::detail::require(in.good(), "cannot open " + path);
  return exsel::load_human_trials(in, categories);
}

const exsel::StimulusSet& category_of(const exsel::CategoryMap& categories,
                                      const std::string& name) {
  const auto it = categories.find(name);
  exsel::detail::require(it != categories.end(), "unknown category '" + name + "'");
  return it->second;
}

// --- commands --------------------------------------------------------------

void run_synth(const RunConfig& c) {
  exsel::detail::require(!c.output.empty(), "--output directory is required");
  OutputBatch batch;
  for (const auto& spec : exsel::default_fixture(c.seed, c.noise)) {
    exsel::Json prov = provenance(c);
    prov["curvature"] = exsel::round_sig9(spec.curvature);
    prov["dim"] = spec.dim;
    prov["category_seed"] = spec.seed;
    batch.add_json(fs::path(c.output) / (spec.category_name + ".json"),
                   exsel::to_json(exsel::generate(spec), prov));
  }
  batch.commit();
}

struct ModelRun {
  exsel::Json records = exsel::Json::array();
  exsel::ModelSelections selections;
};

ModelRun run_models(const RunConfig& c, const exsel::CategoryMap& categories,
                    const std::vector<std::size_t>& quotas) {
  const auto criteria = parse_criteria(c);
  const auto solver = exsel::parse_solver_kind(c.solver);
  ModelRun run;
  for (const auto& [name, set] : categories) {
    const auto matrix = exsel::similarity_matrix(set);
    for (std::size_t quota : quotas) {
      for (const auto& criterion : criteria) {
        const auto sel = exsel::solve(matrix, criterion, quota, solver);
        run.records.push_back(exsel::to_json(sel, set));
        run.selections[{criterion, name, quota}] = set.scales_of(sel.indices);
      }
    }
  }
  return run;
}

void run_select(const RunConfig& c) {
  exsel::detail::require(!c.output.empty(), "--output is required");
  const auto categories = load_categories(c.inputs);
  auto run = run_models(c, categories, c.quotas);
  OutputBatch batch;
  batch.add_json(c.output, {{"provenance", provenance(c)},
                            {"selections", std::move(run.records)}});
  batch.commit();
}

// Mean score per (criterion, quota) across categories, in the quota-by-
// criterion layout used by the alignment table.
std::string score_summary(const exsel::Json& scores) {
  std::vector<std::string> criteria;
  std::vector<std::size_t> quotas;
  std::map<std::pair<std::string, std::size_t>, std::pair<double, int>> proto, div;
  for (const auto& s : scores) {
    if (s["source"] != "model") continue;
    const std::string crit = s["criterion"];
    const std::size_t q = s["quota"];
    if (std::find(criteria.begin(), criteria.end(), crit) == criteria.end()) {
      criteria.push_back(crit);
    }
    if (std::find(quotas.begin(), quotas.end(), q) == quotas.end()) quotas.push_back(q);
    auto& p = proto[{crit, q}];
    p.first += s["prototypicality_score"].get<double>();
    ++p.second;
    if (!s["diversity_score"].is_null()) {
      auto& d = div[{crit, q}];
      d.first += s["diversity_score"].get<double>();
      ++d.second;
    }
  }
  std::sort(quotas.begin(), quotas.end());
  std::string out;
  char buf[64];
  auto panel = [&](const char* title, const auto& table) {
    out += title;
    out += '\n';
    std::snprintf(buf, sizeof buf, "%-7s", "Quota");
    out += buf;
    for (const auto& crit : criteria) {
      std::snprintf(buf, sizeof buf, " %18s", crit.c_str());
      out += buf;
    }
    out += '\n';
    for (std::size_t q : quotas) {
      std::snprintf(buf, sizeof buf, "%-7zu", q);
      std::string row = buf;
      bool any = false;
      for (const auto& crit : criteria) {
        const auto it = table.find({crit, q});
        if (it == table.end()) {
          std::snprintf(buf, sizeof buf, " %18s", "-");
        } else {
          std::snprintf(buf, sizeof buf, " %18.3f", it->second.first / it->second.second);
          any = true;
        }
        row += buf;
      }
      if (any) out += row + '\n';
    }
    out += '\n';
  };
  panel("Prototypicality score (mean over categories)", proto);
  panel("Diversity score (mean over categories)", div);
  return out;
}

void run_score(const RunConfig& c) {
  exsel::detail::require(!c.output.empty(), "--output is required");
  exsel::detail::require(!c.selections.empty() || !c.human.empty(),
                         "score needs --selections and/or --human");
  const auto categories = load_categories(c.inputs);
  const auto mode = exsel::parse_normalization(c.normalization);
  exsel::Json scores = exsel::Json::array();

  if (!c.selections.empty()) {
    std::ifstream in(c.selections);
    exsel::detail::require(in.good(), "cannot open " + c.selections);
    exsel::Json doc;
    try {
      doc = exsel::Json::parse(in);
    } catch (const exsel::Json::parse_error& e) {
      throw exsel::ValidationError(std::string("malformed selections document: ") +
                                   e.what());
    }
    const auto& list = exsel::detail::field(doc, "selections", "selections document");
    exsel::detail::require(list.is_array(), "selections must be an array");
    for (const auto& rec : list) {
      const auto category = exsel::detail::string_field(rec, "category", "selection");
      const auto& set = category_of(categories, category);
      const auto& scales_json = exsel::detail::field(rec, "scales", "selection");
      exsel::detail::require(scales_json.is_array(), "selection.scales must be an array");
      std::vector<double> scales;
      for (const auto& v : scales_json) {
        exsel::detail::require(v.is_number(), "selection.scales must hold numbers");
        scales.push_back(v.get<double>());
      }
      exsel::Json row = {{"source", "model"},
                         {"category", category},
                         {"criterion", exsel::detail::string_field(rec, "criterion", "selection")},
                         {"solver", exsel::detail::string_field(rec, "solver", "selection")},
                         {"scales", exsel::rounded_array(scales)}};
      row.update(exsel::to_json(exsel::score_selection(set, scales, scales.size(), mode)));
      scores.push_back(std::move(row));
    }
  }
  if (!c.human.empty()) {
    for (const auto& t : load_trials(c.human, categories)) {
      const auto& set = category_of(categories, t.category_name);
      exsel::Json row = {{"source", "human"},
                         {"participant_id", t.participant_id},
                         {"category", t.category_name},
                         {"scales", exsel::rounded_array(t.selected_scales)}};
      row.update(exsel::to_json(exsel::score_selection(set, t.selected_scales, t.quota, mode)));
      scores.push_back(std::move(row));
    }
  }

  OutputBatch batch;
  batch.add(sibling_text_path(c.output), score_summary(scores));
  batch.add_json(c.output, {{"provenance", provenance(c)}, {"scores", std::move(scores)}});
  batch.commit();
}

void run_baseline(const RunConfig& c) {
  exsel::detail::require(!c.output.empty(), "--output is required");
  const auto categories = load_categories(c.inputs);
  const auto mode = exsel::parse_normalization(c.normalization);
  exsel::Json rows = exsel::Json::array();
  for (const auto& [name, set] : categories) {
    for (std::size_t quota : c.quotas) {
      rows.push_back(
          {{"category", name},
           {"quota", quota},
           {"normalization", c.normalization},
           {"chance_prototypicality",
            exsel::round_sig9(exsel::chance_prototypicality(set, quota, mode))},
           {"chance_diversity",
            quota >= 2 ? exsel::Json(exsel::round_sig9(exsel::chance_diversity(set, quota)))
                       : exsel::Json(nullptr)}});
    }
  }
  OutputBatch batch;
  batch.add_json(c.output, {{"provenance", provenance(c)}, {"baselines", std::move(rows)}});
  batch.commit();
}

struct CompareResult {
  exsel::Json doc;
  std::string table;
};

CompareResult compare(const RunConfig& c, const exsel::CategoryMap& categories) {
  const auto mode = exsel::parse_normalization(c.normalization);
  const auto trials = load_trials(c.human, categories);
  std::vector<std::size_t> quotas;
  for (const auto& t : trials) {
    if (std::find(quotas.begin(), quotas.end(), t.quota) == quotas.end()) {
      quotas.push_back(t.quota);
    }
  }
  std::sort(quotas.begin(), quotas.end());
  auto run = run_models(c, categories, quotas);
  const auto report = exsel::mae_alignment(run.selections, trials, categories, mode);

  exsel::Json modal = exsel::Json::array();
  for (std::size_t q : quotas) {
    modal.push_back({{"quota", q},
                     {"normalized_scales",
                      exsel::rounded_array(exsel::normalized_modal_choice(trials, categories, q))}});
  }
  CompareResult result;
  result.table = exsel::format_alignment_table(report);
  result.doc = {{"provenance", provenance(c)},
                {"trial_count", trials.size()},
                {"selections", std::move(run.records)},
                {"alignment", exsel::to_json(report)},
                {"human_modal_choices", std::move(modal)}};
  return result;
}

void run_compare(const RunConfig& c) {
  exsel::detail::require(!c.output.empty(), "--output is required");
  exsel::detail::require(!c.human.empty(), "--human is required");
  const auto categories = load_categories(c.inputs);
  auto result = compare(c, categories);
  OutputBatch batch;
  batch.add(sibling_text_path(c.output), result.table);
  batch.add_json(c.output, result.doc);
  batch.commit();
}

// Similarity of every stimulus to its category's midpoint stimulus, plus the
// compare artifacts when --human is given.
void run_report(const RunConfig& c) {
  exsel::detail::require(!c.output.empty(), "--output directory is required");
  const auto categories = load_categories(c.inputs);
  const fs::path dir(c.output);
  std::string csv = "category,id,scale,similarity_to_midpoint\n";
  char buf[64];
  for (const auto& [name, set] : categories) {
    const auto matrix = exsel::similarity_matrix(set);
    const std::size_t mid = set.midpoint_index();
    for (std::size_t i = 0; i < set.size(); ++i) {
      csv += name + "," + set[i].id + ",";
      std::snprintf(buf, sizeof buf, "%.9g,%.9g\n", set[i].scale,
                    exsel::round_sig9(matrix(i, mid)));
      csv += buf;
    }
  }
  OutputBatch batch;
  batch.add(dir / "similarity_curves.csv", csv);
  if (!c.human.empty()) {
    auto result = compare(c, categories);
    batch.add_json(dir / "alignment.json", result.doc);
    batch.add(dir / "alignment_table.txt", result.table);
  } else {
    auto run = run_models(c, categories, c.quotas);
    batch.add_json(dir / "selections.json",
                   {{"provenance", provenance(c)}, {"selections", std::move(run.records)}});
  }
  batch.commit();
}

void print_error(const char* kind, const std::string& message) {
  const exsel::Json err = {{"error", {{"kind", kind}, {"message", message}}}};
  std::cerr << err.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exemplar subset selection and model/human alignment"};
  app.require_subcommand(1);
  RunConfig config;

  auto add_common = [&](CLI::App* sub, bool needs_input) {
    auto* in = sub->add_option("--input", config.inputs,
                               "Stimulus-set JSON files or directories of them");
    if (needs_input) in->required();
    sub->add_option("--output", config.output, "Output file (or directory)")->required();
  };
  auto add_selection = [&](CLI::App* sub) {
    sub->add_option("--criterion", config.criteria,
                    "prototypicality, representativity, diversity, combined")
        ->delimiter(',')
        ->check(CLI::IsMember({"prototypicality", "representativity", "diversity", "combined"}));
    sub->add_option("--solver", config.solver)->check(CLI::IsMember({"exact", "greedy"}));
    sub->add_option("--lambda", config.lambda, "Diversity weight for combined")
        ->check(CLI::NonNegativeNumber);
  };
  auto add_quota = [&](CLI::App* sub) {
    sub->add_option("--quota", config.quotas, "Exemplar quota(s)")->delimiter(',');
  };
  auto add_normalization = [&](CLI::App* sub) {
    sub->add_option("--normalization", config.normalization)
        ->check(CLI::IsMember({"max-scale", "midpoint"}));
  };

  auto* synth = app.add_subcommand("synth", "Write the synthetic fixture categories");
  synth->add_option("--output", config.output, "Output directory")->required();
  synth->add_option("--seed", config.seed);
  synth->add_option("--noise", config.noise, "Isotropic perturbation magnitude")
      ->check(CLI::NonNegativeNumber);

  auto* select = app.add_subcommand("select", "Choose exemplars per category and quota");
  add_common(select, true);
  add_selection(select);
  add_quota(select);

  auto* score = app.add_subcommand("score", "Score model selections and/or human trials");
  add_common(score, true);
  add_normalization(score);
  score->add_option("--selections", config.selections, "Selections JSON from `select`");
  score->add_option("--human", config.human, "Human selections table");

  auto* baseline = app.add_subcommand("baseline", "Exact chance scores");
  add_common(baseline, true);
  add_quota(baseline);
  add_normalization(baseline);

  auto* cmp = app.add_subcommand("compare", "MAE alignment of models against humans");
  add_common(cmp, true);
  add_selection(cmp);
  add_normalization(cmp);
  cmp->add_option("--human", config.human, "Human selections table")->required();

  auto* report = app.add_subcommand("report", "Similarity curves plus selections/alignment");
  add_common(report, true);
  add_selection(report);
  add_quota(report);
  add_normalization(report);
  report->add_option("--human", config.human, "Human selections table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("validation", e.what());
    return 1;
  }

  try {
    for (std::size_t q : config.quotas) {
      exsel::detail::require(q >= 1, "quota must be at least 1");
    }
    config.command = app.get_subcommands().front()->get_name();
    if (config.command == "synth") run_synth(config);
    else if (config.command == "select") run_select(config);
    else if (config.command == "score") run_score(config);
    else if (config.command == "baseline") run_baseline(config);
    else if (config.command == "compare") run_compare(config);
    else if (config.command == "report") run_report(config);
  } catch (const exsel::BudgetExceeded& e) {
    print_error("budget", e.what());
    return 2;
  } catch (const exsel::ValidationError& e) {
    print_error("validation", e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("validation", e.what());
    return 1;
  }
  return 0;
}
