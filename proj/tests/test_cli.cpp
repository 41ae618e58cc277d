#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <regex>
#include <sstream>

#include "anchorfit/anchor_design.hpp"
#include "anchorfit/serialize.hpp"
#include "test_support.hpp"

using namespace anchorfit;
using namespace anchorfit::testing;
namespace fs = std::filesystem;

namespace {

struct Cli {
  fs::path dir;

  explicit Cli(const std::string& name) : dir(scratch_dir("cli_" + name)) {}

  int operator()(const std::string& args, const std::string& env = "") const {
    const std::string cmd = "cd '" + dir.string() + "' && " + env + " '" ANCHORFIT_CLI_PATH "' " +
                            args + " > stdout.txt 2> stderr.txt";
    return run(cmd);
  }
  std::string file(const std::string& name) const { return read_file(dir / name); }
  Json json(const std::string& name) const { return Json::parse(file(name)); }
  void put(const std::string& name, const std::string& text) const { write_file(dir / name, text); }
  std::string err() const { return file("stderr.txt"); }
};

const std::string kData = ANCHORFIT_DATA_DIR;
const std::string kGolden = kData + "/../tests/golden";

std::string boxes_csv(int n, unsigned seed) {
  Rng rng(seed);
  std::ostringstream os;
  os.precision(10);
  os << "image_id,cx,cy,width,height\n";
  for (int i = 0; i < n; ++i) {
    const BoxShape s = anchor_dims(rng.log_uniform(8, 256), rng.log_uniform(1.0 / 6, 6));
    os << "p" << i % 13 << "," << rng.uniform(0, 300) << "," << rng.uniform(0, 300) << ","
       << s.width() << "," << s.height() << "\n";
  }
  return os.str();
}

std::size_t lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_CASE("ingest") {
  Cli cli("ingest");
  cli.put("three.csv", "image_id,cx,cy,width,height\na,1,1,10,20\nb,5,5,30,10\nc,9,9,12,12\n");
  CHECK(cli("ingest -i three.csv -o stats.json") == 0);
  CHECK(cli.json("stats.json")["count"] == 3);
  CHECK(fs::exists(cli.dir / "stats.json.manifest.json"));

  cli.put("empty.csv", "");
  CHECK(cli("ingest -i empty.csv -o e.json") == 2);

  std::string ten = "image_id,cx,cy,width,height\n";
  for (int i = 0; i < 9; ++i) ten += "x,1,1," + std::to_string(10 + i) + ",10\n";
  ten += "bad,1,1,-5,10\n";
  cli.put("ten.csv", ten);
  CHECK(cli("ingest -i ten.csv -o ten.json") == 0);
  CHECK(cli.json("ten.json")["count"] == 9);
  CHECK(lines(cli.err()) == 1);

  CHECK(cli("ingest -i absent.csv -o x.json") == 1);
  CHECK(cli("ingest -o x.json") == 2);
}

TEST_CASE("design reproduces the reference config") {
  Cli cli("design");
  CHECK(cli("design --mar-obj 6 --iou 0.5 --double-set -o t1.json") == 0);
  CHECK(cli.file("t1.json") == read_file(kGolden + "/reference_config.json"));

  CHECK(cli("design --mar-obj 6 --iou 0.5 --double-set --template '" + kData +
            "/reference_template.json' -o t1b.json") == 0);
  CHECK(cli.file("t1b.json") == cli.file("t1.json"));

  const Json doc = cli.json("t1.json");
  CHECK(doc["second_set_sizes"][4] == 300);
  for (int i = 0; i < 4; ++i) {
    const double s = doc["second_set_sizes"][i].get<double>();
    const double expect = std::sqrt(16.0 * std::pow(2.0, i) * 16.0 * std::pow(2.0, i + 1));
    CHECK(s == doctest::Approx(expect).epsilon(1e-8));
  }

  CHECK(cli("design --mar-obj 1 --iou 0.5 -o sq.json") == 0);
  for (const auto& layer : cli.json("sq.json")["layers"]) CHECK(layer["aspect_ratios"] == Json::array({1}));

  CHECK(cli("design --mar-obj 6 --iou 1.0 -o bad.json") == 2);
  CHECK(cli.err().find("singular") != std::string::npos);
  CHECK(cli("design --mar-obj 6 --iou 0 -o bad.json") == 2);
  CHECK(cli("design --iou 0.5 -o bad.json") == 2);
  CHECK_FALSE(fs::exists(cli.dir / "bad.json"));
}

TEST_CASE("design from ingested stats") {
  Cli cli("design_stats");
  std::string text;
  for (int i = 0; i < 100; ++i) text += "x,1,1," + std::to_string(60) + ",10\n";
  cli.put("b.csv", text);
  CHECK(cli("ingest -i b.csv -o s.json --recommend r.json --iou 0.5") == 0);
  CHECK(cli.json("s.json")["mar_obj"] == 6);
  CHECK(cli.json("r.json")["max_anchor_ar"] == 3);
  CHECK(cli("design --stats s.json --iou 0.5 --double-set -o c.json") == 0);
  CHECK(cli.file("c.json") == read_file(kGolden + "/reference_config.json"));
  CHECK(cli("design --stats s.json --mar-obj 6 --iou 0.5 -o c2.json") == 2);
}

TEST_CASE("verify") {
  Cli cli("verify");
  REQUIRE(cli("design --mar-obj 6 --iou 0.5 --double-set -o t1.json") == 0);
  CHECK(cli("verify --config t1.json --k 6 --iou 0.5 -o v.json") == 0);
  const Json v = cli.json("v.json");
  CHECK(v["pass"] == true);
  CHECK(v["coverage"]["min_iou"].get<double>() == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(v["coverage"]["fraction_covered"] == 1);
  CHECK(v["case2"]["counterexamples"] == 0);
  CHECK(v["quadratic"].size() == 3);

  // Force t down to 2.5 on the middle layers.
  std::string forced = cli.file("t1.json");
  forced = std::regex_replace(forced, std::regex("\\b3,\n"), "2.5,\n");
  forced = std::regex_replace(forced, std::regex("0\\.333333333"), "0.4");
  REQUIRE(forced != cli.file("t1.json"));
  cli.put("t25.json", forced);
  CHECK(cli("verify --config t25.json --k 6 --iou 0.5 -o v25.json") == 3);
  CHECK(cli.err().find("counterexample gt") != std::string::npos);
  CHECK(cli.json("v25.json")["pass"] == false);

  REQUIRE(cli("design --mar-obj 1 --iou 0.5 -o k1.json") == 0);
  CHECK(cli("verify --config k1.json --k 1 --iou 0.5 -o vk1.json") == 0);

  CHECK(cli("verify --config t1.json --k 6 --iou 0.5 --grid 32x16x4 --grid-csv g.csv -o vg.json") == 0);
  CHECK(lines(cli.file("g.csv")) == 32 * 16 + 1);
  CHECK(cli("verify --config t1.json --k 6 --iou 0.5 --grid nonsense -o x.json") == 2);
  CHECK(cli("verify --config absent.json --k 6 -o x.json") == 1);
}

TEST_CASE("match") {
  Cli cli("match");
  REQUIRE(cli("design --mar-obj 6 --iou 0.5 --double-set -o t1.json") == 0);
  const AnchorConfig config = config_from_json(cli.json("t1.json"));

  // Boxes equal to anchors at anchor centers.
  std::ostringstream os;
  os.precision(17);
  os << "image_id,cx,cy,width,height\n";
  const auto tiles = tile_anchors(config);
  for (std::size_t i = 0; i < tiles.size(); i += 97)
    os << "a," << tiles[i].box.cx << "," << tiles[i].box.cy << "," << tiles[i].box.shape.width()
       << "," << tiles[i].box.shape.height() << "\n";
  cli.put("anchors.csv", os.str());
  CHECK(cli("match --config t1.json --boxes anchors.csv --iou 0.5 -o m.csv") == 0);
  std::istringstream in(cli.file("m.csv"));
  std::string line;
  std::getline(in, line);
  CHECK(line == "gt_index,layer,anchor_index,iou,matched");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.substr(line.size() - 4) == ",1,1");
  }
  CHECK(rows == (tiles.size() + 96) / 97);

  cli.put("random.csv", boxes_csv(1000, 77));
  CHECK(cli("match --config t1.json --boxes random.csv -o r1.csv") == 0);
  CHECK(cli("match --config t1.json --boxes random.csv -o r2.csv", "ANCHORFIT_THREADS=3") == 0);
  CHECK(lines(cli.file("r1.csv")) == 1001);
  CHECK(cli.file("r1.csv") == cli.file("r2.csv"));

  CHECK(cli("match --config t1.json --boxes absent.csv -o x.csv") == 1);
  CHECK(cli("match --config absent.json --boxes random.csv -o x.csv") == 1);
}

TEST_CASE("scatter") {
  Cli cli("scatter");
  REQUIRE(cli("design --mar-obj 6 --iou 0.5 --double-set -o t1.json") == 0);
  CHECK(cli("scatter --config t1.json -o s.csv") == 0);
  CHECK(lines(cli.file("s.csv")) == 26 + 1);
  cli.put("b.csv", boxes_csv(50, 3));
  CHECK(cli("scatter --config t1.json --boxes b.csv -o sb.csv") == 0);
  CHECK(lines(cli.file("sb.csv")) == 26 + 50 + 1);
  CHECK(cli("scatter --config t1.json --boxes b.csv -o sb.svg") == 0);
  CHECK(cli.file("sb.svg").find("<svg") != std::string::npos);
  CHECK(cli("scatter --config t1.json -o s.png") == 2);
}

TEST_CASE("chain") {
  Cli cli("chain");
  CHECK(cli("chain -o c.json") == 0);
  const Json c = cli.json("c.json");
  std::vector<long long> jumps;
  for (const auto& tap : c["taps"]) jumps.push_back(tap["jump"].get<long long>());
  CHECK(jumps == std::vector<long long>{4, 8, 16, 32, 64});
  CHECK(cli("chain --arch '" + kData + "/vgg16_detection_chain.json' -o c2.json") == 0);
  CHECK(cli.file("c2.json") == cli.file("c.json"));
}

TEST_CASE("manifests") {
  Cli cli("manifest");
  cli.put("b.csv", boxes_csv(20, 5));
  const std::string env = "SOURCE_DATE_EPOCH=1700000000";
  CHECK(cli("ingest -i b.csv -o s.json", env) == 0);
  const Json m = cli.json("s.json.manifest.json");
  CHECK(m["command"] == "ingest");
  CHECK(m["timestamp"] == "2023-11-14T22:13:20Z");
  CHECK(m["tool_version"].get<std::string>().rfind("anchorfit", 0) == 0);
  REQUIRE(m["input_digests"].size() == 1);
  const std::string digest = m["input_digests"].begin()->get<std::string>();
  CHECK(std::regex_match(digest, std::regex("[0-9a-f]{64}")));

  const std::string first = cli.file("s.json.manifest.json");
  CHECK(cli("ingest -i b.csv -o s.json", env) == 0);
  CHECK(cli.file("s.json.manifest.json") == first);

  cli.put("b.csv", boxes_csv(21, 5));
  CHECK(cli("ingest -i b.csv -o s.json", env) == 0);
  CHECK(cli.json("s.json.manifest.json")["input_digests"].begin()->get<std::string>() != digest);
}

TEST_CASE("version and usage") {
  Cli cli("usage");
  CHECK(cli("--version") == 0);
  CHECK(cli.file("stdout.txt").find("anchorfit") != std::string::npos);
  CHECK(cli("") == 2);
  CHECK(cli("frobnicate") == 2);
}
