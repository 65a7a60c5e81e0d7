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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <string>

#include "lttext/formats.hpp"
#include "support/fuzz.hpp"
#include "support/polygon_gen.hpp"

namespace lttext {
namespace {

constexpr const char* kMinimal = R"({"schema_version":"1.0","dataset":{"name":"x","split":"test","images":[]}})";

std::string one_instance_doc(const std::string& category) {
  return R"({"schema_version":"1.0","dataset":{"name":"x","split":"test","images":[
    {"image_id":"a","file_name":"a.jpg","width":100,"height":50,"source_dataset":"x","instances":[
      {"polygon":[[0,0],[10,0],[10,5],[0,5]],"care":true,"transcription":"hi",
       "categories":[")" + category + R"("],"word_level":true,"script":"latin"}]}]}})";
}

TEST(IcdarGt, QuadWithTranscription) {
  const auto v = parse_icdar_gt("0,0,10,0,10,5,0,5,hello");
  ASSERT_EQ(v.size(), 1u);
  EXPECT_TRUE(v[0].care);
  EXPECT_EQ(v[0].transcription, "hello");
  EXPECT_EQ(v[0].polygon.size(), 4u);
  EXPECT_DOUBLE_EQ(area(v[0].polygon), 50.0);
}

TEST(IcdarGt, DontCareMarker) {
  const auto v = parse_icdar_gt("0,0,10,0,10,5,0,5,###");
  ASSERT_EQ(v.size(), 1u);
  EXPECT_FALSE(v[0].care);
  EXPECT_FALSE(v[0].transcription.has_value());
}

TEST(IcdarGt, MalformedCoordinatesNameTheLine) {
  try {
    parse_icdar_gt("0,0,10,abc");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
  try {
    parse_icdar_gt("0,0,10,0,10,5,0,5,ok\n0,0,10,0,10,5,0,zz\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(IcdarGt, BomCrlfAndCommasInTranscription) {
  const auto v = parse_icdar_gt("\xEF\xBB\xBF" "0,0,10,0,10,5,0,5,a,b\r\n\r\n1,1,9,1,9,4,1,4,###\r\n");
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].transcription, "a,b");
  EXPECT_FALSE(v[1].care);
}

TEST(IcdarGt, CurvedPolygonAndNumericTranscription) {
  const auto v = parse_icdar_gt("0,0,5,-1,10,0,10,5,5,6,0,5,2024");
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].polygon.size(), 6u);
  EXPECT_EQ(v[0].transcription, "2024");
}

TEST(IcdarGt, LenientModeSkipsBadLines) {
  Diagnostics d;
  const auto v = parse_icdar_gt("0,0,10,abc\n0,0,10,0,10,5,0,5,ok\n", "img", ParseOptions{false}, &d);
  ASSERT_EQ(v.size(), 1u);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].code, "skipped_line");
  EXPECT_EQ(d[0].location, "img:1");
}

TEST(IcdarDetections, TwoQuadsAndScores) {
  const auto v = parse_icdar_detections("0,0,10,0,10,5,0,5,0.93\n20,0,30,0,30,5,20,5\n");
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].score, 0.93);
  EXPECT_FALSE(v[1].score.has_value());
}

TEST(IcdarDetections, ScoreOutOfRange) {
  EXPECT_THROW(parse_icdar_detections("0,0,10,0,10,5,0,5,1.7"), ParseError);
}

TEST(Canonical, MinimalDocument) {
  const DatasetManifest m = parse_canonical(kMinimal);
  EXPECT_EQ(m.name, "x");
  EXPECT_EQ(m.split, Split::Test);
  EXPECT_TRUE(m.images.empty());
}

TEST(Canonical, CategoryMapping) {
  const DatasetManifest m = parse_canonical(one_instance_doc("blurred"));
  ASSERT_EQ(m.images.size(), 1u);
  const auto& inst = m.images[0].instances.at(0);
  EXPECT_EQ(inst.categories.to_vector(), std::vector{ChallengeCategory::Blurred});
  EXPECT_EQ(inst.script, Script::Latin);
}

TEST(Canonical, UnknownCategoryNamesJsonPath) {
  try {
    parse_canonical(one_instance_doc("blury"));
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.path(), "dataset.images[0].instances[0].categories[0]");
  }
  Diagnostics d;
  const DatasetManifest m = parse_canonical(one_instance_doc("blury"), ParseOptions{false}, &d);
  EXPECT_TRUE(m.images[0].instances[0].categories.empty());
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].code, "unknown_category");
}

TEST(Canonical, UnknownKeysStrictVsLenient) {
  const std::string doc =
      R"({"schema_version":"1.0","dataset":{"name":"x","split":"test","images":[],"extra":1}})";
  EXPECT_THROW(parse_canonical(doc), SchemaError);
  Diagnostics d;
  EXPECT_NO_THROW(parse_canonical(doc, ParseOptions{false}, &d));
  EXPECT_EQ(d.size(), 1u);
}

TEST(Canonical, WrongSchemaVersionAndBadJson) {
  EXPECT_THROW(parse_canonical(R"({"schema_version":"2.0","dataset":{"name":"x","images":[]}})"),
               SchemaError);
  EXPECT_THROW(parse_canonical("{\"schema_version\":"), ParseError);
  EXPECT_THROW(parse_canonical(R"({"schema_version":"1.0","dataset":{"name":3,"images":[]}})"),
               SchemaError);
}

TEST(Canonical, RoundTripIsByteStable) {
  const std::string once = write_canonical(parse_canonical(one_instance_doc("dense")));
  EXPECT_EQ(write_canonical(parse_canonical(once)), once);
  EXPECT_EQ(once.back(), '\n');
}

TEST(Canonical, ImageOrderDoesNotChangeBytes) {
  DatasetManifest m;
  m.name = "order";
  for (const char* id : {"c", "a", "b"}) {
    ImageAnnotation img;
    img.image_id = id;
    img.width = 10;
    img.height = 10;
    TextInstance t;
    t.polygon = testing::box(0.1, 0.2, 3.3, 4.4);
    t.transcription = "w";
    img.instances.push_back(t);
    m.images.push_back(img);
  }
  DatasetManifest r = m;
  std::reverse(r.images.begin(), r.images.end());
  EXPECT_EQ(write_canonical(m), write_canonical(r));
  EXPECT_NE(write_canonical(m).find("0.1"), std::string::npos);
  EXPECT_EQ(write_canonical(m).find("0.10000"), std::string::npos);
}

TEST(Canonical, RandomManifestsRoundTrip) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    DatasetManifest m;
    m.name = "rt";
    m.split = Split::Train;
    for (int i = 0; i < 5; ++i) {
      ImageAnnotation img;
      img.image_id = "img" + std::to_string(trial) + "_" + std::to_string(i);
      img.width = 640;
      img.height = 480;
      img.source_dataset = "rt";
      const auto pair = testing::random_pair(rng);
      TextInstance t;
      t.polygon = testing::to_polygon(pair.a);
      t.care = i % 2 == 0;
      if (t.care) t.transcription = "w\"q\\";
      t.categories.insert(kAllCategories[static_cast<std::size_t>(i + trial) % kCategoryCount]);
      img.instances.push_back(t);
      m.images.push_back(img);
    }
    const std::string bytes = write_canonical(m);
    const DatasetManifest back = parse_canonical(bytes);
    EXPECT_EQ(back, m);
    EXPECT_EQ(write_canonical(back), bytes);
  }
}

TEST(Detections, JsonTwoQuads) {
  const DetectionSet d = parse_detections_json(R"({"schema_version":"1.0","detector":"d","results":[
    {"image_id":"a","polygons":[[[0,0],[10,0],[10,5],[0,5]],[[20,0],[30,0],[30,5],[20,5]]],"scores":[0.5,0.93]}]})");
  EXPECT_EQ(d.detector_name, "d");
  ASSERT_EQ(d.per_image.at("a").size(), 2u);
  EXPECT_EQ(d.per_image.at("a")[1].score, 0.93);
  EXPECT_EQ(parse_detections_json(write_detections(d)), d);
}

TEST(Detections, JsonScoreOutOfRange) {
  EXPECT_THROW(parse_detections_json(R"({"schema_version":"1.0","detector":"d","results":[
    {"image_id":"a","polygons":[[[0,0],[10,0],[10,5],[0,5]]],"scores":[1.7]}]})"),
               Error);
}

TEST(CocoText, LegibilityLanguageAndSet) {
  const std::string doc = R"({"imgs":{
      "1":{"file_name":"a.jpg","width":100,"height":80,"set":"train"},
      "2":{"file_name":"b.jpg","width":100,"height":80,"set":"val"}},
    "anns":{
      "10":{"image_id":1,"bbox":[1,2,30,10],"legibility":"legible","language":"english","utf8_string":"OPEN"},
      "11":{"image_id":1,"mask":[40,10,60,10,60,20,40,20],"legibility":"illegible","language":"english"},
      "12":{"image_id":2,"bbox":[0,0,5,5],"legibility":"legible","language":"not english","utf8_string":"x"}}})";
  const DatasetManifest all = convert_coco_text(doc, "coco");
  ASSERT_EQ(all.images.size(), 2u);
  const auto& a = all.images[0];
  ASSERT_EQ(a.instances.size(), 2u);
  EXPECT_TRUE(a.instances[0].care);
  EXPECT_EQ(a.instances[0].transcription, "OPEN");
  EXPECT_DOUBLE_EQ(area(a.instances[0].polygon), 300.0);
  EXPECT_FALSE(a.instances[1].care);
  EXPECT_EQ(all.images[1].instances[0].script, Script::NonLatin);

  const DatasetManifest train = convert_coco_text(doc, "coco", "train");
  EXPECT_EQ(train.split, Split::Train);
  ASSERT_EQ(train.images.size(), 1u);
  EXPECT_EQ(train.images[0].image_id, "1");
}

TEST(TotalText, CurvedRecordAndDontCare) {
  const std::string txt =
      "x: [[115 503 494 115]], y: [[322 346 426 404]], ornt: [u'm'], transcriptions: [u'nature']\n"
      "x: [[10 40 40 10]], y: [[10 10 20 20]], ornt: [u'#'], transcriptions: [u'#']\n"
      "x: [[0 5 10 10 5 0]],\n  y: [[0 -1 0 5 6 5]], ornt: [u'c'], transcriptions: [u\"it's\"]\n";
  const auto v = parse_total_text(txt, "img1");
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v[0].transcription, "nature");
  EXPECT_EQ(v[0].polygon.size(), 4u);
  EXPECT_FALSE(v[1].care);
  EXPECT_EQ(v[2].polygon.size(), 6u);
  EXPECT_EQ(v[2].transcription, "it's");
  EXPECT_THROW(parse_total_text("x: [[1 2]], y: [[1]]"), ParseError);
}

TEST(Files, ImageIdFromFilename) {
  EXPECT_EQ(image_id_from_filename("dir/gt_img_12.txt"), "img_12");
  EXPECT_EQ(image_id_from_filename("res_img_12.txt"), "img_12");
  EXPECT_EQ(image_id_from_filename("poly_gt_img12.txt"), "img12");
  EXPECT_EQ(image_id_from_filename("plain.txt"), "plain");
}

TEST(Files, MissingFileIsIoError) {
  EXPECT_THROW(read_file("/nonexistent/definitely/missing.json"), IoError);
}

TEST(Fuzz, MutatedInputsNeverEscapeTheErrorHierarchy) {
  const auto report = testing::run_parser_fuzz(10000, 99);
  EXPECT_EQ(report.unexpected, 0u) << report.first_unexpected;
  EXPECT_GT(report.rejected, 0u);
  EXPECT_GT(report.accepted, 0u);
}

}  // namespace
}  // namespace lttext
