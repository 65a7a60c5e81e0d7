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

#include "app.hpp"

#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lttext/lttext.hpp"

namespace lttext::cli {
namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Global {
  std::string threads = "auto";
  std::string log_level = "warn";
  bool strict = false;
  std::string format;
};

class Context {
 public:
  Context(std::ostream& out, std::ostream& err) : out_(out) {
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err, true);
    log_ = std::make_shared<spdlog::logger>("lttext", sink);
    log_->set_pattern("%l: %v");
    log_->set_level(spdlog::level::warn);
  }

  Global global;

  spdlog::logger& log() { return *log_; }

  void configure_logging() {
    std::string level = global.log_level;
    if (const char* env = std::getenv("LTTEXT_LOG"); env != nullptr && *env != '\0') level = env;
    const auto parsed = spdlog::level::from_str(level);
    if (parsed == spdlog::level::off && level != "off") {
      throw UsageError("unknown log level \"" + level + "\"");
    }
    log_->set_level(parsed);
  }

  unsigned threads() const {
    if (global.threads == "auto") return resolve_threads(0);
    const auto n = text::parse_int(global.threads);
    if (!n || *n < 1 || *n > 4096) throw UsageError("--threads expects a positive integer or \"auto\"");
    return static_cast<unsigned>(*n);
  }

  ParseOptions parse_options() const { return ParseOptions{global.strict}; }

  ReportFormat format(ReportFormat fallback) const {
    if (global.format.empty()) return fallback;
    if (auto f = report_format_from_string(global.format)) return *f;
    throw UsageError("--format expects json, csv or markdown");
  }

  void report(const Diagnostics& diags) {
    for (const auto& d : diags) {
      const std::string line = "[" + d.code + "] " + d.location + ": " + d.message;
      switch (d.severity) {
        case Severity::Info: log_->info(line); break;
        case Severity::Warning: log_->warn(line); break;
        case Severity::Error: log_->error(line); break;
      }
    }
  }

  /// Writes to the path, or to standard output when none is given.
  void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
      out_ << text;
      out_.flush();
    } else {
      write_file(path, text);
      log_->info("wrote {}", path);
    }
  }

 private:
  std::ostream& out_;
  std::shared_ptr<spdlog::logger> log_;
};

template <typename F>
auto as_usage(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

DetectionSet load_named_detections(const std::string& path, Context& ctx, Diagnostics& diags) {
  DetectionSet det = load_detections(path, ctx.parse_options(), &diags);
  if (det.detector_name.empty()) det.detector_name = fs::path(path).stem().string();
  return det;
}

std::vector<fs::path> txt_inputs(const fs::path& in) {
  if (!fs::is_directory(in)) {
    if (!fs::exists(in)) throw IoError("cannot open " + in.string());
    return {in};
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(in)) {
    if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

// convert ------------------------------------------------------------------------------

struct ConvertArgs {
  std::string from;
  std::string in;
  std::string name;
  std::string split = "unsplit";
  std::string set;
  std::string size;
  std::string sizes;
  bool strip_non_latin = false;
  bool word_level = false;
  std::string out;
};

std::pair<int, int> parse_size(const std::string& s) {
  const auto x = s.find('x');
  if (x == std::string::npos) throw UsageError("--size expects WxH, e.g. 1280x720");
  const auto w = text::parse_int(std::string_view(s).substr(0, x));
  const auto h = text::parse_int(std::string_view(s).substr(x + 1));
  if (!w || !h || *w <= 0 || *h <= 0 || *w > 1'000'000 || *h > 1'000'000) {
    throw UsageError("--size expects positive WxH");
  }
  return {static_cast<int>(*w), static_cast<int>(*h)};
}

/// "image_id,width,height" rows; a header row is skipped.
std::map<std::string, std::pair<int, int>> read_sizes(const std::string& path) {
  std::map<std::string, std::pair<int, int>> sizes;
  const std::string bytes = read_file(path);
  const auto rows = text::lines(text::strip_bom(bytes));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (text::trim(rows[i]).empty()) continue;
    const auto f = text::split(rows[i], ',');
    if (f.size() != 3) throw ParseError(i + 1, "expected image_id,width,height");
    const auto w = text::parse_int(text::trim(f[1]));
    const auto h = text::parse_int(text::trim(f[2]));
    if (!w || !h) {
      if (i == 0) continue;
      throw ParseError(i + 1, "width and height must be integers");
    }
    if (*w <= 0 || *h <= 0 || *w > 1'000'000 || *h > 1'000'000) {
      throw ParseError(i + 1, "width and height must be positive");
    }
    sizes[std::string(text::trim(f[0]))] = {static_cast<int>(*w), static_cast<int>(*h)};
  }
  return sizes;
}

DatasetManifest clean(DatasetManifest m, bool non_latin, bool word_level, Context& ctx) {
  if (non_latin) {
    auto r = strip_non_latin(m);
    ctx.report(r.report.diagnostics);
    ctx.log().info("non-Latin cleaning demoted {} of {} care instances", r.report.demoted.size(),
                   r.report.examined);
    m = std::move(r.manifest);
  }
  if (word_level) {
    auto r = enforce_word_level(m);
    ctx.report(r.report.diagnostics);
    ctx.log().info("word-level cleaning demoted {} of {} care instances", r.report.demoted.size(),
                   r.report.examined);
    m = std::move(r.manifest);
  }
  return m;
}

int cmd_convert(const ConvertArgs& a, Context& ctx) {
  const auto split = split_from_string(a.split);
  if (!split) throw UsageError("--split expects train, test or unsplit");
  if (a.from != "icdar" && a.from != "total-text" && a.from != "coco-text" && a.from != "canonical") {
    throw UsageError("--from expects icdar, total-text, coco-text or canonical");
  }
  const std::string name = a.name.empty() ? fs::path(a.in).stem().string() : a.name;
  Diagnostics diags;
  DatasetManifest m;
  if (a.from == "coco-text") {
    std::optional<std::string> set;
    if (!a.set.empty()) set = a.set;
    m = convert_coco_text(read_file(a.in), name, set, ctx.parse_options(), &diags);
  } else if (a.from == "canonical") {
    m = load_manifest(a.in, ctx.parse_options(), &diags);
    m.name = name;
  } else {
    if (a.size.empty() && a.sizes.empty()) throw UsageError("--size or --sizes is required for txt inputs");
    std::optional<std::pair<int, int>> fallback;
    if (!a.size.empty()) fallback = parse_size(a.size);
    const auto sizes = a.sizes.empty() ? std::map<std::string, std::pair<int, int>>{} : read_sizes(a.sizes);
    m.name = name;
    for (const auto& f : txt_inputs(a.in)) {
      const std::string id = image_id_from_filename(f);
      std::pair<int, int> wh;
      if (auto it = sizes.find(id); it != sizes.end()) {
        wh = it->second;
      } else if (fallback) {
        wh = *fallback;
      } else {
        throw Error("no size known for image \"" + id + "\"");
      }
      ImageAnnotation img;
      img.image_id = id;
      img.width = wh.first;
      img.height = wh.second;
      try {
        const std::string bytes = read_file(f);
        img.instances = a.from == "icdar" ? parse_icdar_gt(bytes, id, ctx.parse_options(), &diags)
                                          : parse_total_text(bytes, id, ctx.parse_options(), &diags);
      } catch (const ParseError& e) {
        throw ParseError(0, f.string() + ": " + e.what());
      }
      m.images.push_back(std::move(img));
    }
  }
  if (a.from != "canonical") m.split = *split;
  m = clean(std::move(m), a.strip_non_latin, a.word_level, ctx);
  m.sort_images();
  const Diagnostics checks = validate_manifest(m);
  diags.insert(diags.end(), checks.begin(), checks.end());
  ctx.report(diags);
  ctx.emit(write_canonical(m), a.out);
  return kExitOk;
}

// eval ---------------------------------------------------------------------------------

struct EvalArgs {
  std::string gt;
  std::vector<std::string> det;
  std::string mode = "norm";
  double iou = 0.5;
  double dontcare = 0.5;
  bool per_category = false;
  bool per_image = false;
  bool table = false;
  std::string out;
};

int cmd_eval(const EvalArgs& a, Context& ctx) {
  EvalConfig cfg;
  cfg.iou_threshold = a.iou;
  cfg.dontcare_overlap_threshold = a.dontcare;
  const auto mode = EvalMode::parse(a.mode);
  if (!mode) throw UsageError("--mode expects norm, hard or category:<tag>");
  cfg.mode = *mode;
  as_usage([&] { cfg.validate(); });
  const unsigned threads = ctx.threads();
  const ReportFormat fmt = ctx.format(a.table ? ReportFormat::Markdown : ReportFormat::Json);

  Diagnostics diags;
  const DatasetManifest gt = load_manifest(a.gt, ctx.parse_options(), &diags);
  std::vector<DetectionSet> dets;
  for (const auto& path : a.det) dets.push_back(load_named_detections(path, ctx, diags));
  const Diagnostics checks = validate_manifest(gt);
  diags.insert(diags.end(), checks.begin(), checks.end());
  for (const auto& d : checks) {
    if (d.severity == Severity::Error) {
      ctx.report(diags);
      throw Error("ground truth " + a.gt + " failed validation");
    }
  }

  std::string text;
  if (a.table) {
    const auto rows = eval_all_categories(gt, dets, cfg, threads, &diags);
    switch (fmt) {
      case ReportFormat::Json: text = render_category_table_json(rows); break;
      case ReportFormat::Csv: text = render_category_table_csv(rows); break;
      case ReportFormat::Markdown: text = render_category_table_markdown(rows); break;
    }
  } else {
    EvalOptions opts;
    opts.per_category = a.per_category;
    opts.per_image = a.per_image;
    opts.threads = threads;
    std::vector<EvalReport> reports;
    for (const auto& det : dets) reports.push_back(evaluate(gt, det, cfg, opts, &diags));
    switch (fmt) {
      case ReportFormat::Json: text = render_eval_json(reports); break;
      case ReportFormat::Csv: text = render_eval_csv(reports); break;
      case ReportFormat::Markdown: text = render_eval_markdown(reports); break;
    }
  }
  ctx.report(diags);
  ctx.emit(text, a.out);
  return kExitOk;
}

// filter-undetected ------------------------------------------------------------------------

struct FilterArgs {
  std::string gt;
  std::vector<std::string> det;
  double threshold = 0.5;
  bool strip_non_latin = false;
  bool word_level = false;
  std::string out;
};

int cmd_filter(const FilterArgs& a, Context& ctx) {
  FilterConfig cfg;
  cfg.iou_threshold = a.threshold;
  as_usage([&] { cfg.validate(); });
  const unsigned threads = ctx.threads();

  Diagnostics diags;
  DatasetManifest gt = load_manifest(a.gt, ctx.parse_options(), &diags);
  std::vector<DetectionSet> dets;
  for (const auto& path : a.det) dets.push_back(load_named_detections(path, ctx, diags));
  ctx.report(diags);
  gt = clean(std::move(gt), a.strip_non_latin, a.word_level, ctx);

  const FilterOutput result = filter_undetected(dets, gt, cfg, threads);
  ctx.log().info("{} image(s) keep {} undetected instance(s)", result.images_with_undetected.size(),
                 result.instance_count());
  const std::string report = render_filter_json(result, cfg.iou_threshold);
  if (!a.out.empty()) {
    ensure_directory(a.out);
    DatasetManifest kept = filtered_manifest(gt, result);
    write_file(fs::path(a.out) / (gt.name + "-undetected.json"), write_canonical(kept));
    write_file(fs::path(a.out) / "filter_report.json", report);
  }
  ctx.emit(report, "");
  return kExitOk;
}

// merge ----------------------------------------------------------------------------------

struct MergeArgs {
  std::string plan;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
};

int cmd_merge(const MergeArgs& a, Context& ctx) {
  const unsigned threads = ctx.threads();
  const ReportFormat fmt = ctx.format(ReportFormat::Markdown);
  if (fmt == ReportFormat::Csv) throw UsageError("merge reports are json or markdown");
  const PlanSpec spec = read_plan(a.plan);
  Diagnostics diags;
  const MergePlan plan = materialize_plan(spec, threads, ctx.parse_options(), &diags, a.seed);
  ctx.report(diags);
  const JointResult joint = build_joint(plan, threads);
  ensure_directory(a.out);
  write_file(fs::path(a.out) / (joint.train.name + ".json"), write_canonical(joint.train));
  write_file(fs::path(a.out) / (joint.test.name + ".json"), write_canonical(joint.test));
  ctx.emit(fmt == ReportFormat::Json ? render_merge_json(joint.report) : render_merge_markdown(joint.report), "");
  return kExitOk;
}

// dedup -----------------------------------------------------------------------------------

struct DedupArgs {
  std::vector<std::string> inputs;
  std::string hashes;
  bool exact = false;
  double threshold = 0.95;
  std::string out;
};

/// "image_id,hash" rows with a 64-bit hexadecimal hash; a header row is skipped.
std::vector<HashedImage> read_hashes(const std::string& path) {
  std::vector<HashedImage> items;
  const std::string bytes = read_file(path);
  const auto rows = text::lines(text::strip_bom(bytes));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (text::trim(rows[i]).empty()) continue;
    const auto f = text::split(rows[i], ',');
    if (f.size() != 2) throw ParseError(i + 1, "expected image_id,hash");
    std::string hex(text::trim(f[1]));
    if (hex.starts_with("0x") || hex.starts_with("0X")) hex = hex.substr(2);
    const bool valid = !hex.empty() && hex.size() <= 16 &&
                       std::all_of(hex.begin(), hex.end(), [](unsigned char c) { return std::isxdigit(c); });
    if (!valid) {
      if (i == 0) continue;
      throw ParseError(i + 1, "hash must be up to 16 hexadecimal digits");
    }
    items.push_back({std::string(text::trim(f[0])), std::stoull(hex, nullptr, 16)});
  }
  return items;
}

std::vector<fs::path> image_inputs(const std::vector<std::string>& inputs) {
  static const std::vector<std::string> kExtensions = {".png", ".pgm", ".ppm", ".pnm"};
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    if (!fs::is_directory(in)) {
      files.emplace_back(in);
      continue;
    }
    for (const auto& e : fs::directory_iterator(in)) {
      std::string ext = e.path().extension().string();
      std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
      if (e.is_regular_file() && std::find(kExtensions.begin(), kExtensions.end(), ext) != kExtensions.end()) {
        files.push_back(e.path());
      }
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

int cmd_dedup(const DedupArgs& a, Context& ctx) {
  DedupConfig cfg;
  cfg.similarity_threshold = a.threshold;
  cfg.exact = a.exact;
  as_usage([&] { cfg.validate(); });
  if (a.inputs.empty() == a.hashes.empty()) throw UsageError("give image paths or --hashes, not both");
  const unsigned threads = ctx.threads();

  std::vector<HashedImage> items;
  if (!a.hashes.empty()) {
    items = read_hashes(a.hashes);
  } else {
    Diagnostics diags;
    items = hash_image_files(image_inputs(a.inputs), threads, &diags);
    ctx.report(diags);
  }
  std::map<std::string, int> seen;
  for (const auto& it : items) {
    if (++seen[it.image_id] == 2) throw Error("image id \"" + it.image_id + "\" appears twice");
  }
  const DedupResult r = dedup_hashes(std::move(items), cfg);
  ctx.log().info("{} duplicate pair(s); {} survivor(s), {} removed", r.pairs.size(), r.survivors.size(),
                 r.removed.size());
  if (a.out.empty()) {
    ctx.emit(render_duplicate_pairs_csv(r), "");
    return kExitOk;
  }
  ensure_directory(a.out);
  write_file(fs::path(a.out) / "duplicates.csv", render_duplicate_pairs_csv(r));
  write_file(fs::path(a.out) / "survivors.txt", render_survivors(r));
  return kExitOk;
}

// stats -----------------------------------------------------------------------------------

int cmd_stats(const std::string& gt_path, const std::string& out, Context& ctx) {
  Diagnostics diags;
  const DatasetManifest gt = load_manifest(gt_path, ctx.parse_options(), &diags);
  ctx.report(diags);
  ctx.emit(render_stats(dataset_stats(gt), ctx.format(ReportFormat::Markdown)), out);
  return kExitOk;
}

// gap-report --------------------------------------------------------------------------------

/// method → cross-evaluation results. CSV columns: [method,]train,test,f_measure.
/// JSON: an array of {"method"?, "train", "test", "f_measure"} objects.
std::map<std::string, CrossEvalResults> read_cross_results(const std::string& path) {
  std::map<std::string, CrossEvalResults> out;
  const std::string bytes = read_file(path);
  auto add = [&](const std::string& method, const std::string& train, const std::string& test, double f,
                 const std::string& where) {
    if (!out[method].emplace(std::make_pair(train, test), f).second) {
      throw SchemaError(where, "duplicate result for " + train + " -> " + test);
    }
  };
  if (fs::path(path).extension() == ".json") {
    const auto root = detail::parse_json_text(bytes);
    if (!root.is_array()) throw SchemaError("", "expected an array of results");
    for (std::size_t i = 0; i < root.size(); ++i) {
      const auto& r = root[i];
      const std::string where = "[" + std::to_string(i) + "]";
      if (!r.is_object() || !r.contains("train") || !r.contains("test") || !r.contains("f_measure") ||
          !r["train"].is_string() || !r["test"].is_string() || !r["f_measure"].is_number()) {
        throw SchemaError(where, "expected {train, test, f_measure}");
      }
      std::string method;
      if (r.contains("method")) {
        if (!r["method"].is_string()) throw SchemaError(where + ".method", "expected a string");
        method = r["method"].get<std::string>();
      }
      add(method, r["train"].get<std::string>(), r["test"].get<std::string>(), r["f_measure"].get<double>(),
          where);
    }
    return out;
  }
  const auto rows = text::lines(text::strip_bom(bytes));
  std::vector<std::string> header;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (text::trim(rows[i]).empty()) continue;
    std::vector<std::string> f;
    for (auto v : text::split(rows[i], ',')) f.emplace_back(text::trim(v));
    if (header.empty()) {
      header = f;
      continue;
    }
    if (f.size() != header.size()) throw ParseError(i + 1, "field count differs from the header");
    std::map<std::string, std::string> row;
    for (std::size_t k = 0; k < f.size(); ++k) row[header[k]] = f[k];
    if (!row.contains("train") || !row.contains("test") || !row.contains("f_measure")) {
      throw ParseError(i + 1, "header needs train, test and f_measure columns");
    }
    const auto v = text::parse_double(row["f_measure"]);
    if (!v) throw ParseError(i + 1, "f_measure is not a number");
    add(row["method"], row["train"], row["test"], *v, "line " + std::to_string(i + 1));
  }
  return out;
}

int cmd_gap(const std::string& results, const std::string& out, Context& ctx) {
  const ReportFormat fmt = ctx.format(ReportFormat::Markdown);
  const auto by_method = read_cross_results(results);
  if (by_method.empty()) throw Error(results + " holds no results");
  std::string text;
  if (fmt == ReportFormat::Json) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [method, r] : by_method) {
      j[method.empty() ? "default" : method] = nlohmann::ordered_json::parse(render_gap(gap_report(r), fmt));
    }
    text = j.dump(2) + "\n";
  } else {
    for (const auto& [method, r] : by_method) {
      const GapMatrix m = gap_report(r);
      if (fmt == ReportFormat::Csv) {
        std::string body = render_gap(m, fmt);
        if (by_method.size() > 1 || !method.empty()) {
          // prefix each data row with the method name
          const auto rows = text::lines(body);
          std::string prefixed = text.empty() ? "method," + std::string(rows.front()) + "\n" : "";
          for (std::size_t i = 1; i < rows.size(); ++i) prefixed += method + "," + std::string(rows[i]) + "\n";
          body = prefixed;
        }
        text += body;
      } else {
        if (!method.empty()) text += (text.empty() ? "" : "\n") + ("### " + method + "\n\n");
        text += render_gap(m, fmt);
      }
    }
  }
  ctx.emit(text, out);
  return kExitOk;
}

// br-loss -----------------------------------------------------------------------------------

struct LossArgs {
  std::vector<std::string> images;
  double alpha = 0.9;
  double threshold = 0.1;
  bool normalize = false;
  std::string out;
};

int cmd_loss(const LossArgs& a, Context& ctx) {
  LossConfig cfg;
  cfg.alpha = a.alpha;
  cfg.threshold = a.threshold;
  cfg.normalize = a.normalize;
  as_usage([&] { cfg.validate(); });
  if (a.images.size() != 3) throw UsageError("br-loss expects IMAGE RECONSTRUCTION GUIDANCE");
  const ImageTensor image = ImageTensor::from_image(load_image(a.images[0]));
  const ImageTensor recon = ImageTensor::from_image(load_image(a.images[1]));
  const GuidanceMap mg = GuidanceMap::from_image(load_image(a.images[2]));
  ctx.emit(render_loss_json(loss_decomposition(image, recon, mg, cfg), cfg), a.out);
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Context ctx(out, err);
  CLI::App app{"Scene-text benchmark tooling: evaluation, benchmark construction and dataset merging",
               "lttext"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML file with option defaults; explicit flags win");
  app.add_option("--threads", ctx.global.threads, "Worker threads (positive integer or auto)")
      ->capture_default_str();
  app.add_option("--log-level", ctx.global.log_level, "trace, debug, info, warn, error or off")
      ->capture_default_str();
  app.add_flag("--strict", ctx.global.strict, "Reject malformed records instead of skipping them");
  app.add_option("--format", ctx.global.format, "Report format: json, csv or markdown");

  ConvertArgs conv;
  auto* convert = app.add_subcommand("convert", "Convert source annotations to the canonical manifest");
  convert->add_option("--from", conv.from, "icdar, total-text, coco-text or canonical")->required();
  convert->add_option("--in", conv.in, "Input file or directory of per-image txt files")->required();
  convert->add_option("--name", conv.name, "Dataset name (default: input stem)");
  convert->add_option("--split", conv.split, "train, test or unsplit")->capture_default_str();
  convert->add_option("--set", conv.set, "COCO-Text set to keep (train or val)");
  convert->add_option("--size", conv.size, "Image size WxH for every image");
  convert->add_option("--sizes", conv.sizes, "CSV of image_id,width,height");
  convert->add_flag("--strip-non-latin", conv.strip_non_latin, "Demote non-Latin instances to don't-care");
  convert->add_flag("--word-level", conv.word_level, "Demote multi-word instances to don't-care");
  convert->add_option("--out", conv.out, "Output manifest path (default: stdout)");

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Precision, recall and F-measure against ground truth");
  eval->add_option("--gt", ev.gt, "Ground-truth manifest")->required();
  eval->add_option("--det", ev.det, "Detection file or directory (repeatable)")->required();
  eval->add_option("--mode", ev.mode, "norm, hard or category:<tag>")->capture_default_str();
  eval->add_option("--iou-thresh", ev.iou, "IoU needed for a match")->capture_default_str();
  eval->add_option("--dontcare-thresh", ev.dontcare, "Overlap with don't-care that discards a prediction")
      ->capture_default_str();
  eval->add_flag("--per-category", ev.per_category, "Add per-category scores");
  eval->add_flag("--per-image", ev.per_image, "Add per-image counts");
  eval->add_flag("--table", ev.table, "Category comparison table, one row per detector");
  eval->add_option("--out", ev.out, "Report path (default: stdout)");

  FilterArgs fa;
  auto* filter = app.add_subcommand("filter-undetected", "Keep care instances no detector finds");
  filter->add_option("--gt", fa.gt, "Ground-truth manifest")->required();
  filter->add_option("--det", fa.det, "Detection file or directory (repeatable)")->required();
  filter->add_option("--threshold", fa.threshold, "IoU below which an instance counts as undetected")
      ->capture_default_str();
  filter->add_flag("--strip-non-latin", fa.strip_non_latin, "Demote non-Latin instances first");
  filter->add_flag("--word-level", fa.word_level, "Demote multi-word instances first");
  filter->add_option("--out", fa.out, "Directory for the filtered manifest and report");

  MergeArgs ma;
  auto* merge = app.add_subcommand("merge", "Split and union datasets into joint train/test manifests");
  merge->add_option("--plan", ma.plan, "Merge plan (.toml or .json)")->required();
  merge->add_option("--out", ma.out, "Output directory")->capture_default_str();
  merge->add_option("--shuffle-seed", ma.seed, "Order images by a seeded hash before ratio splits");

  DedupArgs da;
  auto* dedup = app.add_subcommand("dedup", "Find near-duplicate images by difference hash");
  dedup->add_option("images", da.inputs, "Image files or directories (PNG, PGM, PPM)");
  dedup->add_option("--hashes", da.hashes, "CSV of image_id,hex hash instead of images");
  dedup->add_flag("--exact", da.exact, "Compare every pair instead of blocking");
  dedup->add_option("--threshold", da.threshold, "Similarity above which images are duplicates")
      ->capture_default_str();
  dedup->add_option("--out", da.out, "Directory for duplicates.csv and survivors.txt");

  std::string stats_gt;
  std::string stats_out;
  auto* stats = app.add_subcommand("stats", "Per-category image and instance counts");
  stats->add_option("--gt", stats_gt, "Manifest")->required();
  stats->add_option("--out", stats_out, "Report path (default: stdout)");

  std::string gap_results;
  std::string gap_out;
  auto* gap = app.add_subcommand("gap-report", "Fine-tuning gap from cross-dataset F-measures");
  gap->add_option("--results", gap_results, "CSV or JSON of train,test,f_measure")->required();
  gap->add_option("--out", gap_out, "Report path (default: stdout)");

  LossArgs la;
  auto* loss = app.add_subcommand("br-loss", "Balanced reconstruction loss of one image");
  loss->add_option("images", la.images, "IMAGE RECONSTRUCTION GUIDANCE")->required()->expected(3);
  loss->add_option("--alpha", la.alpha, "Text-region weight")->capture_default_str();
  loss->add_option("--threshold", la.threshold, "Guidance threshold for text pixels")->capture_default_str();
  loss->add_flag("--normalize", la.normalize, "Divide by the number of values");
  loss->add_option("--out", la.out, "Report path (default: stdout)");

  for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; })) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    ctx.configure_logging();
    (void)ctx.threads();
    if (*convert) return cmd_convert(conv, ctx);
    if (*eval) return cmd_eval(ev, ctx);
    if (*filter) return cmd_filter(fa, ctx);
    if (*merge) return cmd_merge(ma, ctx);
    if (*dedup) return cmd_dedup(da, ctx);
    if (*stats) return cmd_stats(stats_gt, stats_out, ctx);
    if (*gap) return cmd_gap(gap_results, gap_out, ctx);
    if (*loss) return cmd_loss(la, ctx);
  } catch (const UsageError& e) {
    ctx.log().error("{}", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    ctx.log().error("{}", e.what());
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace lttext::cli
