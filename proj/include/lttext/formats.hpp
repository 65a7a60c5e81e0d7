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

// Readers and writers for annotation and detection files.
//
// The canonical JSON schema (version "1.0") is the only format the rest of
// the library consumes; ICDAR-style text files, COCO-Text-like JSON and
// Total-Text txt exports are converted into it once.
//
// Every parser takes ParseOptions. Strict mode turns any irregularity
// (unknown key, invalid polygon, malformed line) into a ParseError or
// SchemaError; lenient mode drops the offending item and records a warning.

#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "lttext/annotation.hpp"
#include "lttext/error.hpp"
#include "lttext/geometry.hpp"
#include "lttext/text.hpp"

namespace lttext {

inline constexpr std::string_view kSchemaVersion = "1.0";
inline constexpr std::string_view kDontCareMarker = "###";

struct ParseOptions {
  bool strict = true;
};

namespace detail {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

inline std::string index_path(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

inline std::string key_path(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

/// JSON walker that reports failures with the offending path.
class JsonReader {
 public:
  JsonReader(const ParseOptions& opts, Diagnostics* diags) : opts_(opts), diags_(diags) {}

  const ParseOptions& options() const { return opts_; }
  Diagnostics* diagnostics() const { return diags_; }

  void expect_object(const json& j, const std::string& path) const {
    if (!j.is_object()) throw SchemaError(path, "expected an object");
  }

  void expect_array(const json& j, const std::string& path) const {
    if (!j.is_array()) throw SchemaError(path, "expected an array");
  }

  void check_keys(const json& obj, const std::string& path,
                  std::initializer_list<std::string_view> allowed) const {
    for (const auto& [key, value] : obj.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) != allowed.end()) continue;
      const std::string where = key_path(path, key);
      if (opts_.strict) throw SchemaError(where, "unknown key");
      emit(diags_, Severity::Warning, "unknown_key", where, "unknown key ignored");
    }
  }

  const json& field(const json& obj, const std::string& path, std::string_view key) const {
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(key_path(path, key), "missing required key");
    return *it;
  }

  const json* optional_field(const json& obj, std::string_view key) const {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
  }

  std::string string(const json& j, const std::string& path) const {
    if (!j.is_string()) throw SchemaError(path, "expected a string");
    return j.get<std::string>();
  }

  bool boolean(const json& j, const std::string& path) const {
    if (!j.is_boolean()) throw SchemaError(path, "expected a boolean");
    return j.get<bool>();
  }

  double number(const json& j, const std::string& path) const {
    if (!j.is_number()) throw SchemaError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw SchemaError(path, "number is not finite");
    return v;
  }

  int positive_int(const json& j, const std::string& path) const {
    if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
    const auto v = j.get<long long>();
    if (v <= 0 || v > 1'000'000'000) throw SchemaError(path, "expected a positive integer");
    return static_cast<int>(v);
  }

  /// [[x,y],...] → Polygon (validity not checked here).
  Polygon polygon(const json& j, const std::string& path) const {
    expect_array(j, path);
    std::vector<Point> pts;
    pts.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
      const std::string p = index_path(path, i);
      const json& pt = j[i];
      if (!pt.is_array() || pt.size() != 2) throw SchemaError(p, "expected [x, y]");
      pts.push_back({number(pt[0], index_path(p, 0)), number(pt[1], index_path(p, 1))});
    }
    return Polygon(std::move(pts));
  }

  /// True when the polygon may be kept; strict mode throws otherwise.
  bool accept_polygon(const Polygon& poly, const std::string& path) const {
    if (poly.is_valid()) return true;
    const std::string what = poly.status() == PolygonStatus::Degenerate
                                 ? "degenerate polygon"
                                 : "self-intersecting polygon";
    if (opts_.strict) throw SchemaError(path, what);
    emit(diags_, Severity::Warning, "dropped_instance", path, what + "; instance dropped");
    return false;
  }

 private:
  ParseOptions opts_;
  Diagnostics* diags_;
};

inline json parse_json_text(std::string_view bytes) {
  try {
    return json::parse(text::strip_bom(bytes));
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("invalid JSON: ") + e.what());
  }
}

inline std::optional<TextInstance> read_instance(const JsonReader& r, const json& j,
                                                 const std::string& path) {
  r.expect_object(j, path);
  r.check_keys(j, path,
               {"polygon", "care", "transcription", "categories", "word_level", "script"});
  TextInstance inst;
  const std::string poly_path = key_path(path, "polygon");
  inst.polygon = r.polygon(r.field(j, path, "polygon"), poly_path);
  inst.care = r.boolean(r.field(j, path, "care"), key_path(path, "care"));
  if (const json* t = r.optional_field(j, "transcription"); t != nullptr && !t->is_null()) {
    inst.transcription = r.string(*t, key_path(path, "transcription"));
    if (*inst.transcription == kDontCareMarker) {
      inst.transcription.reset();
      inst.care = false;
    }
  }
  if (const json* cats = r.optional_field(j, "categories"); cats != nullptr) {
    const std::string cpath = key_path(path, "categories");
    r.expect_array(*cats, cpath);
    for (std::size_t i = 0; i < cats->size(); ++i) {
      const std::string ipath = index_path(cpath, i);
      const std::string tag = r.string((*cats)[i], ipath);
      if (auto c = category_from_string(tag)) {
        inst.categories.insert(*c);
      } else if (r.options().strict) {
        throw SchemaError(ipath, "unknown challenge category \"" + tag + "\"");
      } else {
        emit(r.diagnostics(), Severity::Warning, "unknown_category", ipath,
             "unknown challenge category \"" + tag + "\" ignored");
      }
    }
  }
  if (const json* w = r.optional_field(j, "word_level"); w != nullptr) {
    inst.word_level = r.boolean(*w, key_path(path, "word_level"));
  }
  if (const json* s = r.optional_field(j, "script"); s != nullptr) {
    const std::string spath = key_path(path, "script");
    auto script = script_from_string(r.string(*s, spath));
    if (!script) throw SchemaError(spath, "unknown script");
    inst.script = *script;
  }
  if (!r.accept_polygon(inst.polygon, poly_path)) return std::nullopt;
  return inst;
}

inline ImageAnnotation read_image(const JsonReader& r, const json& j, const std::string& path) {
  r.expect_object(j, path);
  r.check_keys(j, path,
               {"image_id", "file_name", "width", "height", "source_dataset", "instances"});
  ImageAnnotation img;
  img.image_id = r.string(r.field(j, path, "image_id"), key_path(path, "image_id"));
  if (img.image_id.empty()) throw SchemaError(key_path(path, "image_id"), "empty image_id");
  if (const json* f = r.optional_field(j, "file_name"); f != nullptr) {
    img.file_name = r.string(*f, key_path(path, "file_name"));
  }
  img.width = r.positive_int(r.field(j, path, "width"), key_path(path, "width"));
  img.height = r.positive_int(r.field(j, path, "height"), key_path(path, "height"));
  if (const json* s = r.optional_field(j, "source_dataset"); s != nullptr) {
    img.source_dataset = r.string(*s, key_path(path, "source_dataset"));
  }
  const std::string ipath = key_path(path, "instances");
  const json& insts = r.field(j, path, "instances");
  r.expect_array(insts, ipath);
  for (std::size_t i = 0; i < insts.size(); ++i) {
    if (auto inst = read_instance(r, insts[i], index_path(ipath, i))) {
      img.instances.push_back(std::move(*inst));
    }
  }
  return img;
}

inline void check_schema_version(const JsonReader& r, const json& root) {
  const std::string v = r.string(r.field(root, "", "schema_version"), "schema_version");
  if (v != kSchemaVersion) throw SchemaError("schema_version", "unsupported version \"" + v + "\"");
}

/// Wraps nlohmann errors that escape the reader as SchemaError.
template <typename F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error&) {
    throw;
  } catch (const json::exception& e) {
    throw SchemaError("", e.what());
  }
}

inline ordered_json polygon_json(const Polygon& p) {
  ordered_json arr = ordered_json::array();
  for (const Point& pt : p.vertices()) arr.push_back(ordered_json::array({pt.x, pt.y}));
  return arr;
}

inline std::string dump(const ordered_json& j) {
  return j.dump(-1, ' ', false, ordered_json::error_handler_t::replace) + "\n";
}

}  // namespace detail

// Canonical annotation JSON ---------------------------------------------------

inline DatasetManifest parse_canonical(std::string_view bytes, const ParseOptions& opts = {},
                                       Diagnostics* diags = nullptr) {
  const detail::json root = detail::parse_json_text(bytes);
  return detail::guarded([&] {
    const detail::JsonReader r(opts, diags);
    r.expect_object(root, "");
    r.check_keys(root, "", {"schema_version", "dataset"});
    detail::check_schema_version(r, root);
    const detail::json& ds = r.field(root, "", "dataset");
    r.expect_object(ds, "dataset");
    r.check_keys(ds, "dataset", {"name", "split", "images"});
    DatasetManifest m;
    m.name = r.string(r.field(ds, "dataset", "name"), "dataset.name");
    if (const detail::json* s = r.optional_field(ds, "split"); s != nullptr) {
      auto split = split_from_string(r.string(*s, "dataset.split"));
      if (!split) throw SchemaError("dataset.split", "expected train, test or unsplit");
      m.split = *split;
    }
    const detail::json& images = r.field(ds, "dataset", "images");
    r.expect_array(images, "dataset.images");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < images.size(); ++i) {
      const std::string path = detail::index_path("dataset.images", i);
      ImageAnnotation img = detail::read_image(r, images[i], path);
      if (!seen.insert(img.image_id).second) {
        if (opts.strict) throw SchemaError(path + ".image_id", "duplicate image_id");
        detail::emit(diags, Severity::Warning, "duplicate_id", path,
                     "duplicate image_id \"" + img.image_id + "\" dropped");
        continue;
      }
      m.images.push_back(std::move(img));
    }
    return m;
  });
}

/// Deterministic serialization: fixed key order, images sorted by id,
/// shortest round-trip float rendering, trailing newline.
inline std::string write_canonical(const DatasetManifest& m) {
  using detail::ordered_json;
  std::vector<const ImageAnnotation*> order;
  order.reserve(m.images.size());
  for (const auto& img : m.images) order.push_back(&img);
  std::stable_sort(order.begin(), order.end(),
                   [](const auto* a, const auto* b) { return a->image_id < b->image_id; });

  ordered_json images = ordered_json::array();
  for (const ImageAnnotation* img : order) {
    ordered_json insts = ordered_json::array();
    for (const TextInstance& inst : img->instances) {
      ordered_json cats = ordered_json::array();
      for (ChallengeCategory c : inst.categories.to_vector()) cats.push_back(to_string(c));
      ordered_json ji;
      ji["polygon"] = detail::polygon_json(inst.polygon);
      ji["care"] = inst.care;
      ji["transcription"] = inst.transcription ? ordered_json(*inst.transcription) : nullptr;
      ji["categories"] = std::move(cats);
      ji["word_level"] = inst.word_level;
      ji["script"] = to_string(inst.script);
      insts.push_back(std::move(ji));
    }
    ordered_json jimg;
    jimg["image_id"] = img->image_id;
    jimg["file_name"] = img->file_name;
    jimg["width"] = img->width;
    jimg["height"] = img->height;
    jimg["source_dataset"] = img->source_dataset;
    jimg["instances"] = std::move(insts);
    images.push_back(std::move(jimg));
  }
  ordered_json ds;
  ds["name"] = m.name;
  ds["split"] = to_string(m.split);
  ds["images"] = std::move(images);
  ordered_json root;
  root["schema_version"] = kSchemaVersion;
  root["dataset"] = std::move(ds);
  return detail::dump(root);
}

// Canonical detection JSON ----------------------------------------------------

inline DetectionSet parse_detections_json(std::string_view bytes, const ParseOptions& opts = {},
                                          Diagnostics* diags = nullptr) {
  const detail::json root = detail::parse_json_text(bytes);
  return detail::guarded([&] {
    const detail::JsonReader r(opts, diags);
    r.expect_object(root, "");
    r.check_keys(root, "", {"schema_version", "detector", "results"});
    detail::check_schema_version(r, root);
    DetectionSet det;
    det.detector_name = r.string(r.field(root, "", "detector"), "detector");
    const detail::json& results = r.field(root, "", "results");
    r.expect_array(results, "results");
    for (std::size_t i = 0; i < results.size(); ++i) {
      const std::string path = detail::index_path("results", i);
      const detail::json& res = results[i];
      r.expect_object(res, path);
      r.check_keys(res, path, {"image_id", "polygons", "scores"});
      const std::string id =
          r.string(r.field(res, path, "image_id"), detail::key_path(path, "image_id"));
      const std::string ppath = detail::key_path(path, "polygons");
      const detail::json& polys = r.field(res, path, "polygons");
      r.expect_array(polys, ppath);
      std::vector<std::optional<double>> scores(polys.size());
      if (const detail::json* s = r.optional_field(res, "scores"); s != nullptr && !s->is_null()) {
        const std::string spath = detail::key_path(path, "scores");
        r.expect_array(*s, spath);
        if (s->size() != polys.size()) {
          throw SchemaError(spath, "scores and polygons differ in length");
        }
        for (std::size_t k = 0; k < s->size(); ++k) {
          const double v = r.number((*s)[k], detail::index_path(spath, k));
          if (v < 0.0 || v > 1.0) {
            throw SchemaError(detail::index_path(spath, k), "score outside [0, 1]");
          }
          scores[k] = v;
        }
      }
      if (det.per_image.contains(id)) {
        if (opts.strict) throw SchemaError(path, "duplicate image_id \"" + id + "\"");
        detail::emit(diags, Severity::Warning, "duplicate_id", path,
                     "results for \"" + id + "\" appended to earlier entry");
      }
      auto& out = det.per_image[id];
      for (std::size_t k = 0; k < polys.size(); ++k) {
        const std::string kpath = detail::index_path(ppath, k);
        Polygon poly = r.polygon(polys[k], kpath);
        if (!r.accept_polygon(poly, kpath)) continue;
        out.push_back({std::move(poly), scores[k]});
      }
    }
    return det;
  });
}

inline std::string write_detections(const DetectionSet& det) {
  using detail::ordered_json;
  ordered_json results = ordered_json::array();
  for (const auto& [id, polys] : det.per_image) {
    ordered_json jp = ordered_json::array();
    bool all_scored = !polys.empty();
    for (const auto& sp : polys) {
      jp.push_back(detail::polygon_json(sp.polygon));
      all_scored = all_scored && sp.score.has_value();
    }
    ordered_json scores = nullptr;
    if (all_scored) {
      scores = ordered_json::array();
      for (const auto& sp : polys) scores.push_back(*sp.score);
    }
    ordered_json jr;
    jr["image_id"] = id;
    jr["polygons"] = std::move(jp);
    jr["scores"] = std::move(scores);
    results.push_back(std::move(jr));
  }
  ordered_json root;
  root["schema_version"] = kSchemaVersion;
  root["detector"] = det.detector_name;
  root["results"] = std::move(results);
  return detail::dump(root);
}

// ICDAR-style text ------------------------------------------------------------

namespace detail {

inline void line_failure(const ParseOptions& opts, Diagnostics* diags, std::string_view image_id,
                         std::size_t line, const std::string& what) {
  if (opts.strict) throw ParseError(line, what);
  emit(diags, Severity::Warning, "skipped_line", std::string(image_id) + ":" + std::to_string(line),
       what + "; line skipped");
}

inline std::optional<Polygon> polygon_from_coords(const std::vector<double>& coords) {
  std::vector<Point> pts;
  pts.reserve(coords.size() / 2);
  for (std::size_t i = 0; i + 1 < coords.size(); i += 2) pts.push_back({coords[i], coords[i + 1]});
  Polygon poly(std::move(pts));
  if (!poly.is_valid()) return std::nullopt;
  return poly;
}

}  // namespace detail

/// Minimum number of vertices on an ICDAR ground-truth line.
inline constexpr std::size_t kMinIcdarPoints = 4;

/// Parses "x1,y1,...,xN,yN,transcription" lines. A transcription of "###"
/// marks a don't-care region.
inline std::vector<TextInstance> parse_icdar_gt(std::string_view bytes,
                                                std::string_view image_id = {},
                                                const ParseOptions& opts = {},
                                                Diagnostics* diags = nullptr) {
  std::vector<TextInstance> out;
  const auto all = text::lines(text::strip_bom(bytes));
  for (std::size_t ln = 0; ln < all.size(); ++ln) {
    const std::size_t line_no = ln + 1;
    const std::string_view line = all[ln];
    if (text::trim(line).empty()) continue;
    const auto fields = text::split(line, ',');
    std::vector<double> coords;
    std::size_t k = 0;
    for (; k < fields.size(); ++k) {
      auto v = text::parse_double(fields[k]);
      if (!v) break;
      coords.push_back(*v);
    }
    std::string transcription;
    if (k == fields.size()) {
      // Every field numeric: the last one is the transcription.
      coords.pop_back();
      transcription = std::string(text::trim(fields.back()));
    } else {
      for (std::size_t i = k; i < fields.size(); ++i) {
        if (i > k) transcription += ',';
        transcription += fields[i];
      }
      transcription = std::string(text::trim(transcription));
    }
    if (coords.size() % 2 != 0) {
      detail::line_failure(opts, diags, image_id, line_no, "odd number of coordinates");
      continue;
    }
    if (coords.size() / 2 < kMinIcdarPoints) {
      detail::line_failure(opts, diags, image_id, line_no,
                           "expected at least 4 coordinate pairs");
      continue;
    }
    if (!text::is_valid_utf8(transcription)) {
      detail::line_failure(opts, diags, image_id, line_no, "transcription is not valid UTF-8");
      continue;
    }
    auto poly = detail::polygon_from_coords(coords);
    if (!poly) {
      detail::line_failure(opts, diags, image_id, line_no, "invalid polygon");
      continue;
    }
    TextInstance inst;
    inst.polygon = std::move(*poly);
    if (transcription == kDontCareMarker) {
      inst.care = false;
    } else {
      inst.care = true;
      inst.transcription = std::move(transcription);
    }
    out.push_back(std::move(inst));
  }
  return out;
}

/// Builds an image annotation from an ICDAR ground-truth file's contents.
inline ImageAnnotation parse_icdar_gt_image(std::string_view bytes, std::string image_id,
                                            int width, int height, const ParseOptions& opts = {},
                                            Diagnostics* diags = nullptr) {
  ImageAnnotation img;
  img.instances = parse_icdar_gt(bytes, image_id, opts, diags);
  img.image_id = std::move(image_id);
  img.width = width;
  img.height = height;
  return img;
}

/// Parses detection lines "x1,y1,...,xN,yN[,score]"; an odd field count
/// means the last field is a confidence in [0, 1].
inline std::vector<ScoredPolygon> parse_icdar_detections(std::string_view bytes,
                                                         std::string_view image_id = {},
                                                         const ParseOptions& opts = {},
                                                         Diagnostics* diags = nullptr) {
  std::vector<ScoredPolygon> out;
  const auto all = text::lines(text::strip_bom(bytes));
  for (std::size_t ln = 0; ln < all.size(); ++ln) {
    const std::size_t line_no = ln + 1;
    if (text::trim(all[ln]).empty()) continue;
    const auto fields = text::split(all[ln], ',');
    std::vector<double> values;
    bool numeric = true;
    for (auto f : fields) {
      auto v = text::parse_double(f);
      if (!v) {
        numeric = false;
        break;
      }
      values.push_back(*v);
    }
    if (!numeric) {
      detail::line_failure(opts, diags, image_id, line_no, "non-numeric field");
      continue;
    }
    std::optional<double> score;
    if (values.size() % 2 == 1) {
      score = values.back();
      values.pop_back();
      if (*score < 0.0 || *score > 1.0) {
        detail::line_failure(opts, diags, image_id, line_no, "score outside [0, 1]");
        continue;
      }
    }
    if (values.size() < 6) {
      detail::line_failure(opts, diags, image_id, line_no, "expected at least 3 coordinate pairs");
      continue;
    }
    auto poly = detail::polygon_from_coords(values);
    if (!poly) {
      detail::line_failure(opts, diags, image_id, line_no, "invalid polygon");
      continue;
    }
    out.push_back({std::move(*poly), score});
  }
  return out;
}

// Source-dataset converters ---------------------------------------------------

/// Converts a COCO-Text-style JSON ("imgs"/"anns" maps keyed by id strings).
/// Annotations use "mask" (flat polygon) or "bbox" [x, y, w, h];
/// "legibility" == "legible" marks care regions and "language" maps to
/// script. When `set` is given only images whose "set" field matches
/// ("train" or "val") are kept.
inline DatasetManifest convert_coco_text(std::string_view bytes, std::string name,
                                         std::optional<std::string> set = std::nullopt,
                                         const ParseOptions& opts = {},
                                         Diagnostics* diags = nullptr) {
  const detail::json root = detail::parse_json_text(bytes);
  return detail::guarded([&] {
    const detail::JsonReader r(opts, diags);
    r.expect_object(root, "");
    const detail::json& imgs = r.field(root, "", "imgs");
    const detail::json& anns = r.field(root, "", "anns");
    r.expect_object(imgs, "imgs");
    r.expect_object(anns, "anns");

    DatasetManifest m;
    m.name = std::move(name);
    if (set) m.split = *set == "train" ? Split::Train : Split::Test;
    std::map<std::string, ImageAnnotation> by_id;
    for (const auto& [key, img] : imgs.items()) {
      const std::string path = "imgs." + key;
      r.expect_object(img, path);
      if (set) {
        const detail::json* s = r.optional_field(img, "set");
        if (s == nullptr || r.string(*s, path + ".set") != *set) continue;
      }
      ImageAnnotation a;
      a.image_id = key;
      a.file_name = r.string(r.field(img, path, "file_name"), path + ".file_name");
      a.width = r.positive_int(r.field(img, path, "width"), path + ".width");
      a.height = r.positive_int(r.field(img, path, "height"), path + ".height");
      a.source_dataset = m.name;
      by_id.emplace(key, std::move(a));
    }

    // Annotation order by numeric id when possible, for stable output.
    std::vector<std::pair<std::string, const detail::json*>> ordered;
    for (const auto& [key, ann] : anns.items()) ordered.emplace_back(key, &ann);
    std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
      auto ia = text::parse_int(a.first);
      auto ib = text::parse_int(b.first);
      if (ia && ib) return *ia < *ib;
      return a.first < b.first;
    });

    for (const auto& [key, annp] : ordered) {
      const detail::json& ann = *annp;
      const std::string path = "anns." + key;
      r.expect_object(ann, path);
      const detail::json& iid = r.field(ann, path, "image_id");
      const std::string image_id =
          iid.is_string() ? iid.get<std::string>() : std::to_string(r.positive_int(iid, path + ".image_id"));
      auto it = by_id.find(image_id);
      if (it == by_id.end()) continue;

      std::vector<double> coords;
      if (const detail::json* mask = r.optional_field(ann, "mask");
          mask != nullptr && mask->is_array() && mask->size() >= 6) {
        for (std::size_t i = 0; i < mask->size(); ++i) {
          coords.push_back(r.number((*mask)[i], detail::index_path(path + ".mask", i)));
        }
      } else {
        const detail::json& bbox = r.field(ann, path, "bbox");
        if (!bbox.is_array() || bbox.size() != 4) throw SchemaError(path + ".bbox", "expected [x, y, w, h]");
        const double x = r.number(bbox[0], path + ".bbox[0]");
        const double y = r.number(bbox[1], path + ".bbox[1]");
        const double w = r.number(bbox[2], path + ".bbox[2]");
        const double h = r.number(bbox[3], path + ".bbox[3]");
        coords = {x, y, x + w, y, x + w, y + h, x, y + h};
      }
      if (coords.size() % 2 != 0) throw SchemaError(path + ".mask", "odd number of coordinates");
      TextInstance inst;
      std::vector<Point> pts;
      for (std::size_t i = 0; i + 1 < coords.size(); i += 2) pts.push_back({coords[i], coords[i + 1]});
      inst.polygon = Polygon(std::move(pts));
      if (!r.accept_polygon(inst.polygon, path)) continue;
      const detail::json* leg = r.optional_field(ann, "legibility");
      inst.care = leg != nullptr && leg->is_string() && leg->get<std::string>() == "legible";
      if (const detail::json* s = r.optional_field(ann, "utf8_string");
          inst.care && s != nullptr && s->is_string()) {
        inst.transcription = s->get<std::string>();
      }
      if (const detail::json* lang = r.optional_field(ann, "language");
          lang != nullptr && lang->is_string()) {
        const std::string l = lang->get<std::string>();
        inst.script = l == "english" ? Script::Latin
                      : l == "not english" ? Script::NonLatin
                                           : Script::Unknown;
      }
      it->second.instances.push_back(std::move(inst));
    }
    for (auto& [id, img] : by_id) m.images.push_back(std::move(img));
    return m;
  });
}

namespace detail {

// Extracts the bracketed list following `key` ("x:" → "[[1 2 3]]").
inline std::optional<std::vector<double>> total_text_numbers(std::string_view rec,
                                                             std::string_view key) {
  const auto k = rec.find(key);
  if (k == std::string_view::npos) return std::nullopt;
  const auto open = rec.find('[', k + key.size());
  if (open == std::string_view::npos) return std::nullopt;
  const auto close = rec.find(']', open);
  if (close == std::string_view::npos) return std::nullopt;
  std::string body(rec.substr(open, close - open));
  std::replace_if(body.begin(), body.end(), [](char c) { return c == '[' || c == ','; }, ' ');
  std::vector<double> out;
  std::istringstream in(body);
  std::string tok;
  while (in >> tok) {
    auto v = text::parse_double(tok);
    if (!v) return std::nullopt;
    out.push_back(*v);
  }
  return out;
}

// Quoted value after `key` inside "[u'...']"; the closing quote is the last
// quote before the final bracket so embedded quotes survive.
inline std::optional<std::string> total_text_quoted(std::string_view rec, std::string_view key,
                                                    std::string_view stop) {
  const auto k = rec.find(key);
  if (k == std::string_view::npos) return std::nullopt;
  std::string_view rest = rec.substr(k + key.size());
  if (!stop.empty()) {
    if (auto s = rest.find(stop); s != std::string_view::npos) rest = rest.substr(0, s);
  }
  const auto open = rest.find_first_of("'\"");
  if (open == std::string_view::npos) return std::nullopt;
  const char q = rest[open];
  const auto close = rest.rfind(q);
  if (close == std::string_view::npos || close <= open) return std::nullopt;
  return std::string(rest.substr(open + 1, close - open - 1));
}

}  // namespace detail

/// Parses a Total-Text legacy txt export:
/// `x: [[115 503 494 115]], y: [[322 346 426 404]], ornt: [u'm'], transcriptions: [u'text']`.
/// Records may wrap across lines; each starts with "x:". An orientation or
/// transcription of "#" marks a don't-care region.
inline std::vector<TextInstance> parse_total_text(std::string_view bytes,
                                                  std::string_view image_id = {},
                                                  const ParseOptions& opts = {},
                                                  Diagnostics* diags = nullptr) {
  std::vector<std::pair<std::size_t, std::string>> records;
  const auto all = text::lines(text::strip_bom(bytes));
  for (std::size_t ln = 0; ln < all.size(); ++ln) {
    const std::string_view t = text::trim(all[ln]);
    if (t.empty()) continue;
    if (t.starts_with("x:") || records.empty()) {
      records.emplace_back(ln + 1, std::string(t));
    } else {
      records.back().second += ' ';
      records.back().second += t;
    }
  }
  std::vector<TextInstance> out;
  for (const auto& [line_no, rec] : records) {
    auto xs = detail::total_text_numbers(rec, "x:");
    auto ys = detail::total_text_numbers(rec, "y:");
    if (!xs || !ys || xs->size() != ys->size()) {
      detail::line_failure(opts, diags, image_id, line_no, "malformed x/y coordinate lists");
      continue;
    }
    if (xs->size() < 3) {
      detail::line_failure(opts, diags, image_id, line_no, "expected at least 3 points");
      continue;
    }
    std::vector<Point> pts;
    for (std::size_t i = 0; i < xs->size(); ++i) pts.push_back({(*xs)[i], (*ys)[i]});
    Polygon poly(std::move(pts));
    if (!poly.is_valid()) {
      detail::line_failure(opts, diags, image_id, line_no, "invalid polygon");
      continue;
    }
    const auto ornt = detail::total_text_quoted(rec, "ornt:", "transcriptions:");
    const auto trans = detail::total_text_quoted(rec, "transcriptions:", "");
    if (trans && !text::is_valid_utf8(*trans)) {
      detail::line_failure(opts, diags, image_id, line_no, "transcription is not valid UTF-8");
      continue;
    }
    TextInstance inst;
    inst.polygon = std::move(poly);
    inst.care = !(ornt && *ornt == "#") && !(trans && *trans == "#");
    if (inst.care && trans) inst.transcription = *trans;
    out.push_back(std::move(inst));
  }
  return out;
}

// Files -----------------------------------------------------------------------

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

/// "gt_img_12.txt" → "img_12", "res_img_12.txt" → "img_12",
/// "poly_gt_img12.txt" → "img12".
inline std::string image_id_from_filename(const std::filesystem::path& path) {
  std::string stem = path.stem().string();
  for (std::string_view prefix : {"poly_gt_", "gt_", "res_"}) {
    if (stem.starts_with(prefix) && stem.size() > prefix.size()) return stem.substr(prefix.size());
  }
  return stem;
}

inline DatasetManifest load_manifest(const std::filesystem::path& path,
                                     const ParseOptions& opts = {}, Diagnostics* diags = nullptr) {
  return parse_canonical(read_file(path), opts, diags);
}

/// Loads canonical detection JSON, or a directory of per-image txt files
/// named after their image (optionally prefixed "res_").
inline DetectionSet load_detections(const std::filesystem::path& path,
                                    const ParseOptions& opts = {}, Diagnostics* diags = nullptr) {
  if (!std::filesystem::is_directory(path)) {
    return parse_detections_json(read_file(path), opts, diags);
  }
  DetectionSet det;
  det.detector_name = path.filename().string();
  if (det.detector_name.empty()) det.detector_name = path.parent_path().filename().string();
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(path)) {
    if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    const std::string id = image_id_from_filename(f);
    try {
      auto polys = parse_icdar_detections(read_file(f), id, opts, diags);
      auto& slot = det.per_image[id];
      slot.insert(slot.end(), polys.begin(), polys.end());
    } catch (const ParseError& e) {
      throw ParseError(0, f.string() + ": " + e.what());
    }
  }
  return det;
}

}  // namespace lttext
