// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned here.
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "anchorfit/anchor_design.hpp"
#include "anchorfit/boxgeom.hpp"
#include "anchorfit/format.hpp"
#include "anchorfit/matcher.hpp"
#include "anchorfit/oracle.hpp"
#include "anchorfit/serialize.hpp"
#include "test_support.hpp"

using namespace anchorfit;
using namespace anchorfit::testing;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("[%s] AC%d %s: %s\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(double v) { return format_real(v); }

AnchorConfig reference_config() {
  const auto base = reference_template();
  return design_config(6.0, 0.5, base, kReferencePatchSize);
}

void ac1() {
  const double t = max_anchor_ar(6.0, 0.5);
  report(1, t == 3.0, "max anchor AR for k=6, T=0.5 (exact)", "t = " + fmt(t));
}

void ac2() {
  double worst = 0.0;
  std::string where;
  for (double k : {1.0, 2.0, 4.0, 6.0, 8.0}) {
    for (double T : {0.3, 0.4, 0.5, 0.6}) {
      const double diff = std::abs(min_feasible_t(k, T) - max_anchor_ar(k, T));
      if (diff >= worst) {
        worst = diff;
        where = "k=" + fmt(k) + " T=" + fmt(T);
      }
    }
  }
  report(2, worst <= 1e-5, "brute-force t equals closed form (tol 1e-5, 20 pairs)",
         "max |diff| = " + fmt(worst) + " at " + where);
}

void ac3() {
  const AnchorConfig c = reference_config();
  const GridSpec grid = guaranteed_grid(c, 6.0, 512, 256);
  const CoverageReport r = coverage_sweep(c, 6.0, 0.5, grid);
  const bool ok = r.min_iou >= 0.5 - 1e-9 && std::abs(r.min_iou - 0.5) <= 1e-6 &&
                  r.points == 512u * 256u;
  report(3, ok, "coverage, AR<=6, 512x256 grid (min >= 0.5-1e-9, |min-0.5| <= 1e-6)",
         "min IoU = " + fmt(r.min_iou) + ", covered " + std::to_string(r.covered) + "/" +
             std::to_string(r.points));
}

void ac4() {
  const AnchorConfig c = reference_config();
  bool pass3 = true, fail25 = true;
  for (const auto& layer : c.layers) {
    pass3 = pass3 && verify_quadratic(6.0, 0.5, 3.0, layer.anchor_size).pass;
    const QuadraticCheck q = verify_quadratic(6.0, 0.5, 2.5, layer.anchor_size);
    fail25 = fail25 && !q.pass && q.witness.has_value();
  }
  const QuadraticCheck w = verify_quadratic(6.0, 0.5, 2.5, 32.0);
  report(4, pass3 && fail25, "quadratic feasibility (passes at t=3 on all layers, fails at t=2.5)",
         std::string("t=3 ") + (pass3 ? "pass" : "fail") + ", t=2.5 " +
             (fail25 ? "fails with witness" : "does not fail") +
             (w.witness ? " (e.g. gt " + fmt(w.witness->width()) + "x" + fmt(w.witness->height()) + ")" : ""));
}

void ac5() {
  const Case2Report r = verify_case2(reference_config(), 3.0, 0.5, 512, 256);
  report(5, r.counterexamples == 0 && r.pass, "AR < 3 objects between adjacent layers reach 0.5",
         std::to_string(r.points) + " points, " + std::to_string(r.counterexamples) +
             " counterexamples, min IoU " + fmt(r.min_iou));
}

double layer_best(const BoxShape& gt, const LayerSpec& layer) {
  double best = 0.0;
  for (double ar : layer.aspect_ratios)
    best = std::max(best, concentric_iou(gt, anchor_dims(layer.anchor_size, ar)));
  return best;
}

void ac6() {
  const AnchorConfig c = reference_config();
  const double t = 3.0;
  const auto [lo, hi] = guaranteed_height_range(c, t);
  const int n = 10000;
  int violations = 0;
  for (int i = 1; i <= n; ++i) {
    const double h = lo * std::pow(hi / lo, static_cast<double>(i) / n);
    const BoxShape gt(6 * h, h);
    const std::size_t j = assign_layer(gt, c, t);
    const double own = layer_best(gt, c.layers[j]);
    if (j > 0 && layer_best(gt, c.layers[j - 1]) > own + 1e-12) ++violations;
    if (j + 1 < c.layers.size() && layer_best(gt, c.layers[j + 1]) > own + 1e-12) ++violations;
  }
  report(6, violations == 0, "assigned layer beats neighbours for w=6h (10^4 heights)",
         std::to_string(violations) + " violations over h in (" + fmt(lo) + ", " + fmt(hi) + "]");
}

void ac7() {
  const fs::path dir = scratch_dir("acceptance_design");
  const int code = run("cd '" + dir.string() + "' && '" ANCHORFIT_CLI_PATH
                       "' design --mar-obj 6 --iou 0.5 --double-set -o t1.json > /dev/null 2>&1");
  bool ok = code == 0;
  std::string detail = "exit " + std::to_string(code);
  if (ok) {
    const AnchorConfig c = config_from_json(Json::parse(read_file(dir / "t1.json")));
    const std::vector<int> strides{4, 8, 16, 32, 64};
    const std::vector<double> sizes{16, 32, 64, 128, 256};
    const std::vector<std::vector<double>> ars{{1, 2, 0.5},
                                               {1, 1.5, 3, 2.0 / 3, 1.0 / 3},
                                               {1, 1.5, 3, 2.0 / 3, 1.0 / 3},
                                               {1, 1.5, 3, 2.0 / 3, 1.0 / 3},
                                               {1, 1.5, 2.0 / 3}};
    ok = c.layers.size() == 5 && c.double_set && c.second_set_sizes.size() == 5;
    for (std::size_t i = 0; ok && i < 5; ++i) {
      ok = c.layers[i].stride == strides[i] && c.layers[i].anchor_size == sizes[i] &&
           c.layers[i].aspect_ratios.size() == ars[i].size();
      for (std::size_t a = 0; ok && a < ars[i].size(); ++a)
        ok = std::abs(c.layers[i].aspect_ratios[a] - ars[i][a]) <= 1e-12;
      const double second = i + 1 < 5 ? std::sqrt(sizes[i] * sizes[i + 1]) : 300.0;
      ok = ok && std::abs(c.second_set_sizes[i] - second) <= 1e-12;
    }
    detail += ok ? ", strides/sizes/ARs and second-set sizes match" : ", mismatch";
  }
  report(7, ok, "design --mar-obj 6 --iou 0.5 reproduces the reference table", detail);
}

void ac8() {
  Rng rng(8);
  const int cases = 100000;
  int failed = 0;
  for (int i = 0; i < cases; ++i) {
    const BoxShape sa(rng.log_uniform(0.5, 500), rng.log_uniform(0.5, 500));
    const BoxShape sb(rng.log_uniform(0.5, 500), rng.log_uniform(0.5, 500));
    const PlacedBox a{rng.uniform(-300, 300), rng.uniform(-300, 300), sa};
    const PlacedBox b{rng.uniform(-300, 300), rng.uniform(-300, 300), sb};
    const double ab = iou(a, b);
    bool ok = ab == iou(b, a) && ab >= 0.0 && ab <= 1.0;
    ok = ok && std::abs(iou(a, a) - 1.0) <= 1e-12;
    ok = ok && concentric_iou(sa, sb) + 1e-12 >= ab;
    const double size = rng.log_uniform(0.5, 500);
    const double ar = rng.log_uniform(0.02, 50);
    const BoxShape d = anchor_dims(size, ar);
    ok = ok && std::abs(d.area() - size * size) <= 1e-9 * size * size;
    if (!ok) ++failed;
  }
  report(8, failed == 0, "IoU symmetry/range/identity, concentric dominance, anchor area",
         std::to_string(cases) + " random cases, " + std::to_string(failed) + " failures");
}

void ac9() {
  const fs::path dir = scratch_dir("acceptance_determinism");
  std::ostringstream boxes;
  boxes.precision(10);
  boxes << "image_id,cx,cy,width,height\n";
  Rng rng(9);
  for (int i = 0; i < 500; ++i) {
    const BoxShape s = anchor_dims(rng.log_uniform(8, 256), rng.log_uniform(1.0 / 6, 6));
    boxes << "p" << i % 11 << "," << rng.uniform(0, 300) << "," << rng.uniform(0, 300) << ","
          << s.width() << "," << s.height() << "\n";
  }
  write_file(dir / "boxes.csv", boxes.str());
  write_file(dir / "bad.csv", "image_id,cx,cy,width,height\na,1,1,10,10\nb,1,1,0,1\n");

  const std::vector<std::pair<std::string, std::string>> commands{
      {"ingest -i boxes.csv --recommend rec@.json --iou 0.5 -o stats@.json", "stats@.json rec@.json"},
      {"ingest -i bad.csv -o bad@.json", "bad@.json"},
      {"design --stats stats1.json --iou 0.5 --double-set -o cfg@.json", "cfg@.json"},
      {"design --mar-obj 6 --iou 0.5 --double-set -o t1_@.json", "t1_@.json"},
      {"verify --config t1_1.json --k 6 --iou 0.5 --grid 128x64x4 --grid-csv grid@.csv -o ver@.json",
       "ver@.json grid@.csv"},
      {"match --config t1_1.json --boxes boxes.csv --iou 0.5 -o match@.csv", "match@.csv"},
      {"scatter --config t1_1.json --boxes boxes.csv -o sc@.svg", "sc@.svg"},
      {"scatter --config t1_1.json --boxes boxes.csv -o sc@.csv", "sc@.csv"},
      {"chain -o chain@.json", "chain@.json"},
  };
  const auto subst = [](std::string s, char run_id) {
    for (auto p = s.find('@'); p != std::string::npos; p = s.find('@')) s[p] = run_id;
    return s;
  };
  int compared = 0, differing = 0;
  std::string first_diff;
  for (const auto& [args, outputs] : commands) {
    for (char run_id : {'1', '2'}) {
      const std::string threads = run_id == '1' ? "1" : "4";
      run("cd '" + dir.string() + "' && SOURCE_DATE_EPOCH=1700000000 ANCHORFIT_THREADS=" + threads +
          " '" ANCHORFIT_CLI_PATH "' " + subst(args, run_id) + " > /dev/null 2>&1");
    }
    std::istringstream names(outputs);
    std::string name;
    while (names >> name) {
      for (const std::string& suffix : {std::string(), std::string(".manifest.json")}) {
        const fs::path a = dir / (subst(name, '1') + suffix);
        const fs::path b = dir / (subst(name, '2') + suffix);
        ++compared;
        // Manifests name their outputs, so compare after swapping the run id back.
        std::string tb = read_file(b);
        const std::string from = subst(name, '2'), to = subst(name, '1');
        for (auto p = tb.find(from); p != std::string::npos; p = tb.find(from, p + to.size()))
          tb.replace(p, from.size(), to);
        if (!fs::exists(a) || !fs::exists(b) || read_file(a) != tb) {
          ++differing;
          if (first_diff.empty()) first_diff = a.filename().string();
        }
      }
    }
  }
  report(9, differing == 0 && compared > 0, "CLI reruns are byte-identical (incl. manifests)",
         std::to_string(compared) + " files compared, " + std::to_string(differing) + " differ" +
             (first_diff.empty() ? "" : " (first: " + first_diff + ")"));
}

}  // namespace

int main() {
  ac1();
  ac2();
  ac3();
  ac4();
  ac5();
  ac6();
  ac7();
  ac8();
  ac9();
  std::printf("%s: %d of 9 criteria failed\n", failures ? "FAILED" : "OK", failures);
  return failures == 0 ? 0 : 1;
}
