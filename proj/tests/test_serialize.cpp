#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "anchorfit/anchor_design.hpp"
#include "anchorfit/errors.hpp"
#include "anchorfit/layerchain.hpp"
#include "anchorfit/serialize.hpp"
#include "anchorfit/stats_ingest.hpp"
#include "test_support.hpp"

using namespace anchorfit;

namespace {

AnchorConfig reference_config() {
  const auto base = reference_template();
  return design_config(6.0, 0.5, base, kReferencePatchSize);
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("canonical numbers") {
  CHECK(canonical_number(3.0).dump() == "3");
  CHECK(canonical_number(-0.0).dump() == "0");
  CHECK(canonical_number(1.0 / 3.0).dump() == "0.333333333");
  CHECK(canonical_number(22.627416997969522).dump() == "22.627417");
  CHECK(canonical_number(1e-12).dump() == "1e-12");
  CHECK(dump_canonical(Json{{"b", 1}, {"a", 2}}) == "{\n  \"a\": 2,\n  \"b\": 1\n}\n");
}

TEST_CASE("config round trip") {
  const AnchorConfig c = reference_config();
  const Json doc = to_json(c);
  const AnchorConfig back = config_from_json(doc);
  REQUIRE(back.layers.size() == c.layers.size());
  for (std::size_t i = 0; i < c.layers.size(); ++i) {
    CHECK(back.layers[i].name == c.layers[i].name);
    CHECK(back.layers[i].stride == c.layers[i].stride);
    CHECK(back.layers[i].anchor_size == c.layers[i].anchor_size);
    CHECK(back.layers[i].receptive_field == c.layers[i].receptive_field);
    // Reciprocals written at 9 digits snap back to exact reciprocals.
    CHECK(back.layers[i].aspect_ratios == c.layers[i].aspect_ratios);
  }
  CHECK(back.second_set_sizes == c.second_set_sizes);
  CHECK(back.double_set);
  CHECK(back.patch_size == 300);
  CHECK(dump_canonical(to_json(back)) == dump_canonical(doc));
}

TEST_CASE("config errors") {
  Json doc = to_json(reference_config());
  Json missing = doc;
  missing.erase("layers");
  CHECK_THROWS_AS(config_from_json(missing), ParseError);

  Json bad_second = doc;
  bad_second["second_set_sizes"][1] = 50.0;
  CHECK_THROWS_AS(config_from_json(bad_second), InvalidConfigError);

  Json bad_size = doc;
  bad_size["layers"][2]["anchor_size"] = 70.0;
  CHECK_THROWS_AS(config_from_json(bad_size), InvalidConfigError);

  Json wrong_type = doc;
  wrong_type["layers"][0]["stride"] = "four";
  CHECK_THROWS_AS(config_from_json(wrong_type), ParseError);
}

TEST_CASE("template file matches the built-in template") {
  int patch = 0;
  const auto from_file =
      template_from_json(read_json_file(std::string(ANCHORFIT_DATA_DIR) + "/reference_template.json"), &patch);
  const auto builtin = reference_template();
  CHECK(patch == kReferencePatchSize);
  REQUIRE(from_file.size() == builtin.size());
  for (std::size_t i = 0; i < builtin.size(); ++i) {
    CHECK(from_file[i].name == builtin[i].name);
    CHECK(from_file[i].stride == builtin[i].stride);
    CHECK(from_file[i].anchor_size == builtin[i].anchor_size);
    CHECK(from_file[i].receptive_field == builtin[i].receptive_field);
  }
}

TEST_CASE("architecture file matches the built-in chain") {
  const auto arch =
      architecture_from_json(read_json_file(std::string(ANCHORFIT_DATA_DIR) + "/vgg16_detection_chain.json"));
  const auto chain = vgg16_detection_chain();
  REQUIRE(arch.layers.size() == chain.size());
  for (std::size_t i = 0; i < chain.size(); ++i) {
    CHECK(arch.layers[i].name == chain[i].name);
    CHECK(arch.layers[i].kernel == chain[i].kernel);
    CHECK(arch.layers[i].stride == chain[i].stride);
    CHECK(arch.layers[i].padding == chain[i].padding);
  }
  CHECK(arch.taps == vgg16_detection_taps());
  const ArchitectureDescriptor back = architecture_from_json(to_json(arch));
  CHECK(back.taps == arch.taps);
}

TEST_CASE("stats round trip") {
  DatasetStats s;
  s.count = 12;
  s.rejected = 2;
  s.mar_obj = 6.1;
  s.size_min = 8;
  s.size_max = 300;
  for (int p : kReportedPercentiles) {
    s.ar_percentiles[p] = 1.0 + p / 20.0;
    s.size_percentiles[p] = 10.0 + p;
  }
  const DatasetStats back = stats_from_json(to_json(s));
  CHECK(back.count == 12);
  CHECK(back.rejected == 2);
  CHECK(back.mar_obj == doctest::Approx(6.1));
  CHECK(back.ar_percentiles.size() == s.ar_percentiles.size());
  CHECK(back.size_percentiles.at(99) == doctest::Approx(109));
}

TEST_CASE("csv and svg writers") {
  const AnchorConfig c = reference_config();
  const std::vector<BoxShape> gt{BoxShape(10, 20), BoxShape(40, 8)};
  const auto points = scatter_data(c, gt);

  std::ostringstream csv;
  write_scatter_csv(csv, points);
  CHECK(csv.str().rfind("series,width,height\n", 0) == 0);
  CHECK(count(csv.str(), "\n") == points.size() + 1);

  std::ostringstream svg;
  write_scatter_svg(svg, points);
  CHECK(svg.str().find("<svg") != std::string::npos);
  // 7 AR series plus the second set.
  CHECK(count(svg.str(), "data-series=") == 8);
  CHECK(count(svg.str(), "<polyline") == 8);

  std::vector<MatchResult> results(2);
  results[0].gt_index = 0;
  results[0].layer = "conv4_3";
  results[0].anchor_index = 17;
  results[0].iou = 0.75;
  results[0].matched = true;
  results[1].gt_index = 1;
  std::ostringstream match;
  write_match_csv(match, results);
  CHECK(match.str() == "gt_index,layer,anchor_index,iou,matched\n0,conv4_3,17,0.75,1\n1,,-1,0,0\n");
}

TEST_CASE("reading missing or malformed json") {
  const auto dir = anchorfit::testing::scratch_dir("serialize");
  CHECK_THROWS_AS(read_json_file(dir / "absent.json"), IoError);
  anchorfit::testing::write_file(dir / "bad.json", "{ not json");
  CHECK_THROWS_AS(read_json_file(dir / "bad.json"), ParseError);
}
