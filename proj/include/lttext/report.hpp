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

// Report rendering. Percentages carry one decimal ("45.7"); undefined
// scores render as an em dash in tables and null in JSON. No timestamps.

#pragma once

#include <cstdio>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "lttext/annotation.hpp"
#include "lttext/benchmark.hpp"
#include "lttext/eval.hpp"
#include "lttext/jdl.hpp"
#include "lttext/recon_loss.hpp"

namespace lttext {

enum class ReportFormat { Json, Csv, Markdown };

inline std::optional<ReportFormat> report_format_from_string(std::string_view s) {
  if (s == "json") return ReportFormat::Json;
  if (s == "csv") return ReportFormat::Csv;
  if (s == "markdown" || s == "md") return ReportFormat::Markdown;
  return std::nullopt;
}

inline constexpr std::string_view kUndefinedCell = "—";

/// Fraction → percentage with one decimal, e.g. 0.457 → "45.7".
inline std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", fraction * 100.0);
  return buf;
}

/// One decimal, for values already in percent.
inline std::string format_one_decimal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

inline std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

namespace detail {

using report_json = nlohmann::ordered_json;

inline std::string render(const report_json& j) {
  return j.dump(2, ' ', false, report_json::error_handler_t::replace) + "\n";
}

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string md_cell(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

inline report_json counts_json(const MatchCounts& c, const Scores& s) {
  report_json j;
  j["true_positives"] = c.true_positives;
  j["false_positives"] = c.false_positives;
  j["false_negatives"] = c.false_negatives;
  j["precision"] = s.precision;
  j["recall"] = s.recall;
  j["f_measure"] = s.f_measure;
  return j;
}

inline std::string percent_or_dash(const std::optional<double>& f) {
  return f ? format_percent(*f) : std::string(kUndefinedCell);
}

}  // namespace detail

// Evaluation -------------------------------------------------------------------------

inline nlohmann::ordered_json eval_report_json(const EvalReport& r) {
  detail::report_json j;
  j["detector"] = r.detector;
  j["mode"] = r.config.mode.to_string();
  j["iou_threshold"] = r.config.iou_threshold;
  j["dontcare_overlap_threshold"] = r.config.dontcare_overlap_threshold;
  j["images"] = r.images;
  const auto overall = detail::counts_json(r.counts, r.scores);
  for (const auto& [k, v] : overall.items()) j[k] = v;
  if (r.per_category) {
    detail::report_json cats;
    for (ChallengeCategory c : kTableOrder) {
      const CategoryScore& s = r.per_category->at(c);
      detail::report_json cj = detail::counts_json(s.counts, s.scores);
      if (s.vacuous()) {
        cj["precision"] = nullptr;
        cj["recall"] = nullptr;
        cj["f_measure"] = nullptr;
      }
      cj["group"] = to_string(group_of(c));
      cats[to_string(c)] = std::move(cj);
    }
    j["per_category"] = std::move(cats);
  }
  if (r.per_image) {
    detail::report_json imgs = detail::report_json::array();
    for (const auto& row : *r.per_image) {
      detail::report_json ij;
      ij["image_id"] = row.image_id;
      const auto counts = detail::counts_json(row.counts, scores_from(row.counts));
      for (const auto& [k, v] : counts.items()) ij[k] = v;
      imgs.push_back(std::move(ij));
    }
    j["per_image"] = std::move(imgs);
  }
  return j;
}

inline std::string render_eval_json(const EvalReport& r) { return detail::render(eval_report_json(r)); }

inline std::string render_eval_json(std::span<const EvalReport> reports) {
  if (reports.size() == 1) return render_eval_json(reports.front());
  detail::report_json arr = detail::report_json::array();
  for (const auto& r : reports) arr.push_back(eval_report_json(r));
  return detail::render(arr);
}

/// Flat rows: detector,mode,scope,tp,fp,fn,precision,recall,f_measure.
inline std::string render_eval_csv(std::span<const EvalReport> reports) {
  std::ostringstream out;
  out << "detector,mode,scope,true_positives,false_positives,false_negatives,precision,recall,"
         "f_measure\n";
  auto row = [&](const EvalReport& r, std::string_view scope, const MatchCounts& c,
                 const std::optional<Scores>& s) {
    out << detail::csv_field(r.detector) << ',' << r.config.mode.to_string() << ',' << scope << ','
        << c.true_positives << ',' << c.false_positives << ',' << c.false_negatives << ',';
    if (s) {
      out << format_fixed(s->precision, 6) << ',' << format_fixed(s->recall, 6) << ','
          << format_fixed(s->f_measure, 6) << '\n';
    } else {
      out << ",,\n";
    }
  };
  for (const auto& r : reports) {
    row(r, "overall", r.counts, r.scores);
    if (r.per_category) {
      for (ChallengeCategory c : kTableOrder) {
        const CategoryScore& s = r.per_category->at(c);
        row(r, to_string(c), s.counts,
            s.vacuous() ? std::nullopt : std::optional<Scores>(s.scores));
      }
    }
  }
  return out.str();
}

inline std::string render_eval_markdown(std::span<const EvalReport> reports) {
  std::ostringstream out;
  out << "| Detector | Mode | TP | FP | FN | P | R | F |\n";
  out << "|---|---|---:|---:|---:|---:|---:|---:|\n";
  for (const auto& r : reports) {
    out << "| " << detail::md_cell(r.detector) << " | " << r.config.mode.to_string() << " | "
        << r.counts.true_positives << " | " << r.counts.false_positives << " | "
        << r.counts.false_negatives << " | " << format_percent(r.scores.precision) << " | "
        << format_percent(r.scores.recall) << " | " << format_percent(r.scores.f_measure)
        << " |\n";
  }
  for (const auto& r : reports) {
    if (!r.per_category) continue;
    out << "\n**" << detail::md_cell(r.detector) << "** per category (F-measure %)\n\n";
    out << "| Category | Group | TP | FP | FN | F |\n|---|---|---:|---:|---:|---:|\n";
    for (ChallengeCategory c : kTableOrder) {
      const CategoryScore& s = r.per_category->at(c);
      out << "| " << display_name(c) << " | " << to_string(group_of(c)) << " | "
          << s.counts.true_positives << " | " << s.counts.false_positives << " | "
          << s.counts.false_negatives << " | "
          << (s.vacuous() ? std::string(kUndefinedCell) : format_percent(s.scores.f_measure))
          << " |\n";
    }
  }
  return out.str();
}

// Per-category comparison table ------------------------------------------------------

inline std::vector<std::string> category_table_header() {
  std::vector<std::string> h{"Method"};
  for (ChallengeCategory c : kTableOrder) h.emplace_back(display_name(c));
  h.emplace_back("Hard");
  h.emplace_back("Norm");
  return h;
}

inline std::vector<std::string> category_table_cells(const CategoryTableRow& row) {
  std::vector<std::string> cells{row.detector};
  for (ChallengeCategory c : kTableOrder) cells.push_back(detail::percent_or_dash(row.category(c)));
  cells.push_back(detail::percent_or_dash(row.hard_f));
  cells.push_back(detail::percent_or_dash(row.norm_f));
  return cells;
}

inline std::string render_category_table_markdown(std::span<const CategoryTableRow> rows) {
  std::ostringstream out;
  out << "Groups: Intra-instance = Blurred..Delimited; Inter-instance = Dense, Overlapped; "
         "Background = Occluded, Low-Contrast, Complex-BG; Others. F-measure (%).\n\n";
  const auto header = category_table_header();
  out << '|';
  for (const auto& h : header) out << ' ' << h << " |";
  out << "\n|---|";
  for (std::size_t i = 1; i < header.size(); ++i) out << "---:|";
  out << '\n';
  for (const auto& row : rows) {
    out << '|';
    for (const auto& c : category_table_cells(row)) out << ' ' << detail::md_cell(c) << " |";
    out << '\n';
  }
  return out.str();
}

inline std::string render_category_table_csv(std::span<const CategoryTableRow> rows) {
  std::ostringstream out;
  const auto header = category_table_header();
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    const auto cells = category_table_cells(row);
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << detail::csv_field(cells[i]);
    out << '\n';
  }
  return out.str();
}

inline std::string render_category_table_json(std::span<const CategoryTableRow> rows) {
  detail::report_json arr = detail::report_json::array();
  auto value = [](const std::optional<double>& f) -> detail::report_json {
    return f ? detail::report_json(*f) : detail::report_json(nullptr);
  };
  for (const auto& row : rows) {
    detail::report_json j;
    j["detector"] = row.detector;
    detail::report_json cats;
    for (ChallengeCategory c : kTableOrder) cats[to_string(c)] = value(row.category(c));
    j["categories"] = std::move(cats);
    j["hard"] = value(row.hard_f);
    j["norm"] = value(row.norm_f);
    arr.push_back(std::move(j));
  }
  return detail::render(arr);
}

// Statistics ---------------------------------------------------------------------------

inline std::string render_stats(const StatsReport& s, ReportFormat fmt) {
  switch (fmt) {
    case ReportFormat::Json: {
      detail::report_json j;
      j["images"] = s.images;
      j["care_instances"] = s.care_instances;
      j["dontcare_instances"] = s.dontcare_instances;
      j["attributes"] = s.attributes;
      j["mean_attributes"] = s.mean_attributes();
      detail::report_json cats;
      for (ChallengeCategory c : kAllCategories) {
        detail::report_json cj;
        cj["images"] = s[c].images;
        cj["instances"] = s[c].instances;
        cats[to_string(c)] = std::move(cj);
      }
      j["per_category"] = std::move(cats);
      return detail::render(j);
    }
    case ReportFormat::Csv: {
      std::ostringstream out;
      out << "category,images,instances\n";
      for (ChallengeCategory c : kAllCategories) {
        out << to_string(c) << ',' << s[c].images << ',' << s[c].instances << '\n';
      }
      out << "total," << s.images << ',' << s.care_instances << '\n';
      return out.str();
    }
    case ReportFormat::Markdown: {
      std::ostringstream out;
      out << "| Category | # Images / # Instances |\n|---|---:|\n";
      for (ChallengeCategory c : kAllCategories) {
        out << "| " << display_name(c) << " | " << s[c].images << '/' << s[c].instances << " |\n";
      }
      out << "| Total | " << s.images << '/' << s.care_instances << " |\n\n";
      out << "Care instances: " << s.care_instances << "; don't-care: " << s.dontcare_instances
          << "; challenge attributes: " << s.attributes << " (mean "
          << format_fixed(s.mean_attributes(), 3) << " per care instance)\n";
      return out.str();
    }
  }
  return {};
}

// Fine-tuning gap ------------------------------------------------------------------------

/// Cells are F-measures in the caller's unit (typically percent).
inline std::string render_gap(const GapMatrix& m, ReportFormat fmt) {
  switch (fmt) {
    case ReportFormat::Json: {
      detail::report_json j;
      detail::report_json cells = detail::report_json::array();
      for (const auto& [key, f] : m.cells) {
        detail::report_json c;
        c["train"] = key.first;
        c["test"] = key.second;
        c["f_measure"] = f;
        cells.push_back(std::move(c));
      }
      j["cells"] = std::move(cells);
      detail::report_json gaps = detail::report_json::array();
      for (const auto& g : m.gaps) {
        detail::report_json gj;
        gj["train"] = g.train;
        gj["test"] = g.test;
        gj["in_domain"] = g.in_domain;
        gj["cross_domain"] = g.cross_domain;
        gj["gap"] = g.gap;
        gaps.push_back(std::move(gj));
      }
      j["gaps"] = std::move(gaps);
      j["max_gap"] = m.gaps.empty() ? detail::report_json(nullptr) : detail::report_json(m.max_gap);
      j["mean_gap"] = m.gaps.empty() ? detail::report_json(nullptr) : detail::report_json(m.mean_gap);
      return detail::render(j);
    }
    case ReportFormat::Csv: {
      std::ostringstream out;
      out << "train,test,in_domain,cross_domain,gap\n";
      for (const auto& g : m.gaps) {
        out << detail::csv_field(g.train) << ',' << detail::csv_field(g.test) << ','
            << format_one_decimal(g.in_domain) << ',' << format_one_decimal(g.cross_domain) << ','
            << format_one_decimal(g.gap) << '\n';
      }
      return out.str();
    }
    case ReportFormat::Markdown: {
      std::ostringstream out;
      out << "| Fine-tune \\ Eval |";
      for (const auto& c : m.columns) out << ' ' << detail::md_cell(c) << " |";
      out << " Avg. |\n|---|";
      for (std::size_t i = 0; i <= m.columns.size(); ++i) out << "---:|";
      out << '\n';
      for (const auto& r : m.rows) {
        out << "| " << detail::md_cell(r) << " |";
        for (const auto& c : m.columns) {
          const auto f = m.cell(r, c);
          out << ' ' << (f ? format_one_decimal(*f) : std::string(kUndefinedCell)) << " |";
        }
        const auto avg = m.row_mean(r);
        out << ' ' << (avg ? format_one_decimal(*avg) : std::string(kUndefinedCell)) << " |\n";
      }
      out << "\n| Fine-tune | Eval | Gap |\n|---|---|---:|\n";
      for (const auto& g : m.gaps) {
        out << "| " << detail::md_cell(g.train) << " | " << detail::md_cell(g.test) << " | "
            << format_one_decimal(g.gap) << " |\n";
      }
      if (!m.gaps.empty()) {
        out << "\nMax gap: " << format_one_decimal(m.max_gap)
            << "; mean gap: " << format_one_decimal(m.mean_gap) << '\n';
      }
      return out.str();
    }
  }
  return {};
}

// Merge ----------------------------------------------------------------------------------

/// Table in the shape of a joint-dataset composition table; a trailing ↓ on
/// the train total marks images removed for having no instances.
inline std::string render_merge_markdown(const MergeReport& r) {
  std::ostringstream out;
  out << "| Dataset | Policy | Input | Train | Test |\n|---|---|---:|---:|---:|\n";
  for (const auto& c : r.rows) {
    out << "| " << detail::md_cell(c.dataset) << " | " << c.policy << " | " << c.input_images
        << " | " << c.train << (c.dropped_empty > 0 ? "↓" : "") << " | " << c.test << " |\n";
  }
  out << "| Total | - | - | " << r.train_total << (r.dropped_total > 0 ? "↓" : "") << " | "
      << r.test_total << " |\n";
  return out.str();
}

inline std::string render_merge_json(const MergeReport& r) {
  detail::report_json j;
  j["name"] = r.name;
  detail::report_json rows = detail::report_json::array();
  for (const auto& c : r.rows) {
    detail::report_json cj;
    cj["dataset"] = c.dataset;
    cj["policy"] = c.policy;
    cj["input_images"] = c.input_images;
    cj["train"] = c.train;
    cj["test"] = c.test;
    cj["dropped_empty"] = c.dropped_empty;
    rows.push_back(std::move(cj));
  }
  j["datasets"] = std::move(rows);
  j["train_total"] = r.train_total;
  j["test_total"] = r.test_total;
  j["dropped_total"] = r.dropped_total;
  return detail::render(j);
}

// Benchmark construction -------------------------------------------------------------------

inline std::string render_filter_json(const FilterOutput& f, double threshold) {
  detail::report_json j;
  j["iou_threshold"] = threshold;
  j["images_with_undetected"] = f.images_with_undetected;
  j["undetected_instances"] = f.instance_count();
  detail::report_json per = detail::report_json::object();
  for (const auto& [id, list] : f.undetected) {
    detail::report_json arr = detail::report_json::array();
    for (const auto& u : list) {
      detail::report_json uj;
      uj["index"] = u.index;
      uj["max_iou"] = u.max_iou;
      arr.push_back(std::move(uj));
    }
    per[id] = std::move(arr);
  }
  j["undetected"] = std::move(per);
  return detail::render(j);
}

inline std::string render_cleaning_json(const CleaningReport& r, std::string_view step) {
  detail::report_json j;
  j["step"] = step;
  j["examined"] = r.examined;
  j["demoted"] = r.demoted.size();
  detail::report_json list = detail::report_json::array();
  for (const auto& d : r.demoted) {
    detail::report_json dj;
    dj["image_id"] = d.image_id;
    dj["index"] = d.index;
    dj["reason"] = d.reason;
    list.push_back(std::move(dj));
  }
  j["instances"] = std::move(list);
  return detail::render(j);
}

/// id_a,id_b,similarity rows.
inline std::string render_duplicate_pairs_csv(const DedupResult& r) {
  std::ostringstream out;
  out << "id_a,id_b,similarity\n";
  for (const auto& p : r.pairs) {
    out << detail::csv_field(p.first) << ',' << detail::csv_field(p.second) << ','
        << format_fixed(p.similarity, 6) << '\n';
  }
  return out.str();
}

inline std::string render_survivors(const DedupResult& r) {
  std::string out;
  for (const auto& id : r.survivors) out += id + "\n";
  return out;
}

// Loss ---------------------------------------------------------------------------------------

inline std::string render_loss_json(const LossTerms& t, const LossConfig& cfg) {
  detail::report_json j;
  j["total"] = t.total();
  j["text_term"] = t.text_term;
  j["background_term"] = t.background_term;
  j["alpha"] = cfg.alpha;
  j["threshold"] = cfg.threshold;
  j["normalize"] = cfg.normalize;
  return detail::render(j);
}

}  // namespace lttext
