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

// Merge plans, written in TOML (or the equivalent JSON):
//
//   name = "joint"
//   require_at_least_one_instance = true
//   shuffle_seed = 7                      # optional
//
//   [[datasets]]
//   name = "ic15"
//   policy = "keep_original"              # | ratio | english_only_then_ratio
//   manifests = ["ic15_train.json", "ic15_test.json"]
//
//   [[datasets]]
//   name = "art"
//   policy = "ratio"
//   train_fraction = 0.8
//   manifests = ["art.json"]
//
// Manifest paths are relative to the plan file.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "lttext/error.hpp"
#include "lttext/formats.hpp"
#include "lttext/jdl.hpp"
#include "lttext/parallel.hpp"
#include "toml.hpp"

namespace lttext {

struct PlanEntrySpec {
  std::string name;
  SplitPolicy::Kind policy = SplitPolicy::Kind::KeepOriginal;
  double train_fraction = 0.8;
  std::vector<std::filesystem::path> manifests;
};

struct PlanSpec {
  std::string name = "joint";
  bool require_at_least_one_instance = true;
  std::optional<std::uint64_t> shuffle_seed;
  std::vector<PlanEntrySpec> datasets;
};

namespace detail {

inline std::string plan_path(std::size_t i, std::string_view key) {
  return "datasets[" + std::to_string(i) + "]." + std::string(key);
}

inline SplitPolicy::Kind plan_policy(std::string_view s, const std::string& path) {
  if (auto k = SplitPolicy::kind_from_string(s)) return *k;
  throw SchemaError(path, "unknown policy \"" + std::string(s) + "\"");
}

inline void check_plan(const PlanSpec& p) {
  if (p.datasets.empty()) throw SchemaError("datasets", "plan lists no datasets");
  for (std::size_t i = 0; i < p.datasets.size(); ++i) {
    const auto& e = p.datasets[i];
    if (e.name.empty()) throw SchemaError(plan_path(i, "name"), "missing dataset name");
    if (e.manifests.empty()) throw SchemaError(plan_path(i, "manifests"), "no manifests listed");
    if (e.policy != SplitPolicy::Kind::KeepOriginal && !(e.train_fraction > 0.0 && e.train_fraction < 1.0)) {
      throw SchemaError(plan_path(i, "train_fraction"), "must lie in (0, 1)");
    }
  }
}

inline PlanSpec plan_from_toml(std::string_view text, const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    throw ParseError(e.source().begin.line, std::string(e.description()));
  }
  PlanSpec p;
  if (auto v = root["name"].value<std::string>()) p.name = *v;
  if (root.contains("require_at_least_one_instance")) {
    auto v = root["require_at_least_one_instance"].value<bool>();
    if (!v) throw SchemaError("require_at_least_one_instance", "expected a boolean");
    p.require_at_least_one_instance = *v;
  }
  if (root.contains("shuffle_seed")) {
    auto v = root["shuffle_seed"].value<std::int64_t>();
    if (!v || *v < 0) throw SchemaError("shuffle_seed", "expected a non-negative integer");
    p.shuffle_seed = static_cast<std::uint64_t>(*v);
  }
  const toml::array* datasets = root["datasets"].as_array();
  if (datasets == nullptr) throw SchemaError("datasets", "expected an array of tables");
  for (std::size_t i = 0; i < datasets->size(); ++i) {
    const toml::table* t = (*datasets)[i].as_table();
    if (t == nullptr) throw SchemaError("datasets[" + std::to_string(i) + "]", "expected a table");
    PlanEntrySpec e;
    auto name = (*t)["name"].value<std::string>();
    if (!name) throw SchemaError(plan_path(i, "name"), "expected a string");
    e.name = *name;
    if (auto pol = (*t)["policy"].value<std::string>()) {
      e.policy = plan_policy(*pol, plan_path(i, "policy"));
    } else if (t->contains("policy")) {
      throw SchemaError(plan_path(i, "policy"), "expected a string");
    }
    if (t->contains("train_fraction")) {
      auto f = (*t)["train_fraction"].value<double>();
      if (!f) throw SchemaError(plan_path(i, "train_fraction"), "expected a number");
      e.train_fraction = *f;
    }
    const toml::array* ms = (*t)["manifests"].as_array();
    if (ms == nullptr) throw SchemaError(plan_path(i, "manifests"), "expected an array of paths");
    for (std::size_t k = 0; k < ms->size(); ++k) {
      auto m = (*ms)[k].value<std::string>();
      if (!m) throw SchemaError(plan_path(i, "manifests") + "[" + std::to_string(k) + "]", "expected a string");
      e.manifests.emplace_back(*m);
    }
    p.datasets.push_back(std::move(e));
  }
  return p;
}

inline PlanSpec plan_from_json(std::string_view text) {
  const nlohmann::json root = parse_json_text(text);
  return guarded([&] {
    const JsonReader r{ParseOptions{}, nullptr};
    r.expect_object(root, "");
    PlanSpec p;
    if (const auto* v = r.optional_field(root, "name")) p.name = r.string(*v, "name");
    if (const auto* v = r.optional_field(root, "require_at_least_one_instance")) {
      p.require_at_least_one_instance = r.boolean(*v, "require_at_least_one_instance");
    }
    if (const auto* v = r.optional_field(root, "shuffle_seed")) {
      if (!v->is_number_unsigned()) throw SchemaError("shuffle_seed", "expected a non-negative integer");
      p.shuffle_seed = v->get<std::uint64_t>();
    }
    const auto& ds = r.field(root, "", "datasets");
    r.expect_array(ds, "datasets");
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const auto& t = ds[i];
      r.expect_object(t, "datasets[" + std::to_string(i) + "]");
      PlanEntrySpec e;
      e.name = r.string(r.field(t, "datasets[" + std::to_string(i) + "]", "name"), plan_path(i, "name"));
      if (const auto* v = r.optional_field(t, "policy")) {
        e.policy = plan_policy(r.string(*v, plan_path(i, "policy")), plan_path(i, "policy"));
      }
      if (const auto* v = r.optional_field(t, "train_fraction")) {
        e.train_fraction = r.number(*v, plan_path(i, "train_fraction"));
      }
      const auto& ms = r.field(t, "datasets[" + std::to_string(i) + "]", "manifests");
      r.expect_array(ms, plan_path(i, "manifests"));
      for (std::size_t k = 0; k < ms.size(); ++k) {
        e.manifests.emplace_back(r.string(ms[k], index_path(plan_path(i, "manifests"), k)));
      }
      p.datasets.push_back(std::move(e));
    }
    return p;
  });
}

}  // namespace detail

/// Parses plan text; `json` selects the JSON syntax instead of TOML.
inline PlanSpec parse_plan(std::string_view text, bool json = false, const std::string& source = "plan") {
  PlanSpec p = json ? detail::plan_from_json(text) : detail::plan_from_toml(text, source);
  detail::check_plan(p);
  return p;
}

inline PlanSpec read_plan(const std::filesystem::path& path) {
  PlanSpec p = parse_plan(read_file(path), path.extension() == ".json", path.string());
  for (auto& e : p.datasets) {
    for (auto& m : e.manifests) {
      if (m.is_relative()) m = path.parent_path() / m;
    }
  }
  return p;
}

/// Loads every manifest the plan names (in parallel) into a MergePlan.
/// `seed_override` replaces the plan's shuffle seed when set.
inline MergePlan materialize_plan(const PlanSpec& spec, unsigned threads = 1,
                                  const ParseOptions& opts = {}, Diagnostics* diags = nullptr,
                                  std::optional<std::uint64_t> seed_override = std::nullopt) {
  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  for (std::size_t i = 0; i < spec.datasets.size(); ++i) {
    for (std::size_t k = 0; k < spec.datasets[i].manifests.size(); ++k) jobs.emplace_back(i, k);
  }
  std::vector<DatasetManifest> loaded(jobs.size());
  std::vector<Diagnostics> job_diags(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t j) {
    const auto& path = spec.datasets[jobs[j].first].manifests[jobs[j].second];
    try {
      loaded[j] = load_manifest(path, opts, &job_diags[j]);
    } catch (const SchemaError& e) {
      std::string_view msg = e.what();
      if (!e.path().empty() && msg.starts_with(e.path() + ": ")) msg.remove_prefix(e.path().size() + 2);
      throw SchemaError(e.path(), std::string(msg) + " (in " + path.string() + ")");
    } catch (const ParseError& e) {
      throw ParseError(0, path.string() + ": " + e.what());
    }
  });
  if (diags != nullptr) {
    for (auto& d : job_diags) diags->insert(diags->end(), d.begin(), d.end());
  }

  const auto seed = seed_override ? seed_override : spec.shuffle_seed;
  MergePlan plan;
  plan.name = spec.name;
  plan.require_at_least_one_instance = spec.require_at_least_one_instance;
  std::size_t j = 0;
  for (const auto& e : spec.datasets) {
    PlanEntry entry;
    entry.name = e.name;
    switch (e.policy) {
      case SplitPolicy::Kind::KeepOriginal: entry.policy = SplitPolicy::keep_original(); break;
      case SplitPolicy::Kind::Ratio: entry.policy = SplitPolicy::ratio(e.train_fraction); break;
      case SplitPolicy::Kind::EnglishOnlyThenRatio:
        entry.policy = SplitPolicy::english_only_then_ratio(e.train_fraction);
        break;
    }
    entry.policy = entry.policy.with_shuffle_seed(seed);
    for (std::size_t k = 0; k < e.manifests.size(); ++k) entry.manifests.push_back(std::move(loaded[j++]));
    plan.datasets.push_back(std::move(entry));
  }
  return plan;
}

}  // namespace lttext
