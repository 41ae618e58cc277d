#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "anchorfit/anchor_design.hpp"
#include "anchorfit/box_csv.hpp"
#include "anchorfit/errors.hpp"
#include "anchorfit/format.hpp"
#include "anchorfit/layerchain.hpp"
#include "anchorfit/matcher.hpp"
#include "anchorfit/oracle.hpp"
#include "anchorfit/recommend.hpp"
#include "anchorfit/serialize.hpp"
#include "anchorfit/stats_ingest.hpp"
#include "manifest.hpp"

namespace anchorfit::cli {

namespace fs = std::filesystem;

namespace {

// Maps library errors onto the exit-code contract.
int guarded(const char* command, const std::function<int()>& body) {
  try {
    return body();
  } catch (const IoError& e) {
    std::cerr << command << ": " << e.what() << "\n";
    return kExitIo;
  } catch (const EmptyDatasetError& e) {
    std::cerr << command << ": " << e.what() << "\n";
    return kExitParse;
  } catch (const ParseError& e) {
    std::cerr << command << ": parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const InvalidConfigError& e) {
    std::cerr << command << ": invalid config: " << e.what() << "\n";
    return kExitParse;
  } catch (const UnsupportedConfigError& e) {
    std::cerr << command << ": unsupported config: " << e.what() << "\n";
    return kExitParse;
  } catch (const NotFoundError& e) {
    std::cerr << command << ": " << e.what() << "\n";
    return kExitParse;
  } catch (const std::invalid_argument& e) {
    std::cerr << command << ": invalid argument: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << command << ": " << e.what() << "\n";
    return kExitIo;
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<BoxRecord> load_boxes(const std::string& path) {
  std::ifstream in = open_input(path);
  BoxCsv csv = read_box_csv(in);
  for (const auto& e : csv.errors) {
    std::cerr << "warning: " << path << ":" << e.line << ": " << e.message << "\n";
  }
  return std::move(csv.boxes);
}

AnchorConfig load_config(const std::string& path) {
  open_input(path);
  return config_from_json(read_json_file(path));
}

struct GridDims {
  int sizes = 512;
  int ars = 256;
  int offsets = 0;
};

GridDims parse_grid(const std::string& text) {
  GridDims dims;
  std::vector<int> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, 'x')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument("trailing characters");
      parts.push_back(v);
    } catch (const std::exception&) {
      throw std::invalid_argument("grid spec must look like 512x256 or 512x256x16, got '" +
                                  text + "'");
    }
  }
  if (parts.size() < 2 || parts.size() > 3) {
    throw std::invalid_argument("grid spec must look like 512x256 or 512x256x16, got '" + text +
                                "'");
  }
  dims.sizes = parts[0];
  dims.ars = parts[1];
  if (parts.size() == 3) dims.offsets = parts[2];
  return dims;
}

void check_iou(double iou) {
  if (!(iou > 0.0 && iou < 1.0)) {
    throw std::invalid_argument("--iou must lie in (0, 1); at 1 the max-AR criterion is singular "
                                "(T/(2-2T) divides by zero)");
  }
}

}  // namespace

int run_ingest(const IngestArgs& args) {
  return guarded("ingest", [&] {
    check_iou(args.iou);
    std::ifstream in = open_input(args.input);
    IngestResult result = ingest(in);
    for (const auto& e : result.errors) {
      std::cerr << "warning: " << args.input << ":" << e.line << ": " << e.message << "\n";
    }
    write_text(args.output, dump_canonical(to_json(result.stats)));
    const auto params = std::map<std::string, std::string>{{"iou", format_real(args.iou)}};
    write_manifest(make_manifest("ingest", params, {args.input}), args.output);
    if (!args.recommend_output.empty()) {
      const Recommendation rec = recommend(result.stats, args.iou);
      for (const auto& w : rec.warnings) std::cerr << "warning: " << w << "\n";
      write_text(args.recommend_output, dump_canonical(to_json(rec)));
      write_manifest(make_manifest("ingest", params, {args.input}), args.recommend_output);
    }
    return kExitOk;
  });
}

int run_design(const DesignArgs& args) {
  return guarded("design", [&] {
    check_iou(args.iou);
    if (args.stats.empty() == !args.mar_obj.has_value()) {
      throw std::invalid_argument("give exactly one of --stats and --mar-obj");
    }
    std::vector<fs::path> inputs;
    double mar_obj = 0.0;
    if (args.mar_obj) {
      mar_obj = *args.mar_obj;
    } else {
      open_input(args.stats);
      mar_obj = stats_from_json(read_json_file(args.stats)).mar_obj;
      inputs.push_back(args.stats);
    }

    int patch = kReferencePatchSize;
    std::vector<LayerSpec> base = reference_template();
    if (!args.template_path.empty()) {
      open_input(args.template_path);
      base = template_from_json(read_json_file(args.template_path), &patch);
      inputs.push_back(args.template_path);
    }
    DesignOptions options;
    options.double_set = args.double_set;
    options.first_layer_max_ar = args.first_layer_max_ar;
    options.last_layer_max_ar = args.last_layer_max_ar;

    const AnchorConfig config = design_config(mar_obj, args.iou, base, patch, options);
    write_text(args.output, dump_canonical(to_json(config)));
    write_manifest(make_manifest("design",
                                 {{"mar_obj", format_real(mar_obj)},
                                  {"iou", format_real(args.iou)},
                                  {"double_set", args.double_set ? "true" : "false"},
                                  {"first_layer_max_ar", format_real(args.first_layer_max_ar)},
                                  {"last_layer_max_ar", format_real(args.last_layer_max_ar)},
                                  {"template", args.template_path.empty() ? "builtin:reference"
                                                                          : args.template_path}},
                                 inputs),
                   args.output);
    return kExitOk;
  });
}

int run_verify(const VerifyArgs& args) {
  return guarded("verify", [&] {
    check_iou(args.iou);
    if (!(args.k >= 1.0)) throw std::invalid_argument("--k must be >= 1");
    const GridDims dims = parse_grid(args.grid);
    const AnchorConfig config = load_config(args.config);
    const double t = config_max_ar(config);
    bool pass = true;

    Json quadratic = Json::array();
    for (std::size_t j = 1; j < config.layers.size(); ++j) {
      const auto& layer = config.layers[j];
      const bool carries_t = std::any_of(layer.aspect_ratios.begin(), layer.aspect_ratios.end(),
                                         [&](double ar) { return std::abs(ar - t) <= 1e-9 * t; });
      if (!carries_t) continue;
      const double s = layer.anchor_size;
      const QuadraticCheck check = verify_quadratic(args.k, args.iou, t, s);
      Json entry = to_json(check);
      entry["layer"] = layer.name;
      quadratic.push_back(entry);
      if (!check.pass) {
        pass = false;
        std::cerr << "verify: quadratic feasibility fails at layer " << layer.name
                  << " (t = " << format_real(t) << ")";
        if (check.witness) {
          std::cerr << "; counterexample gt " << format_real(check.witness->width()) << "x"
                    << format_real(check.witness->height());
        }
        std::cerr << "\n";
      }
    }

    Json case2;
    try {
      const Case2Report report = verify_case2(config, t, args.iou, dims.sizes, dims.ars);
      case2 = to_json(report);
      if (!report.pass) {
        pass = false;
        std::cerr << "verify: " << report.counterexamples << " counterexamples to the adjacent-"
                  << "layer guarantee for AR < t\n";
        for (const auto& w : report.witnesses) {
          std::cerr << "  gt " << format_real(w.width) << "x" << format_real(w.height) << " between "
                    << w.lower_layer << " and " << w.upper_layer << ": best IoU "
                    << format_real(std::max(w.iou_lower, w.iou_upper)) << "\n";
        }
      }
    } catch (const UnsupportedConfigError& e) {
      case2 = {{"skipped", e.what()}};
    }

    Json coverage;
    try {
      const GridSpec grid = guaranteed_grid(config, args.k, dims.sizes, dims.ars, dims.offsets);
      const CoverageReport report =
          coverage_sweep(config, args.k, args.iou, grid, !args.grid_csv.empty());
      coverage = to_json(report);
      if (report.covered != report.points) {
        pass = false;
        std::cerr << "verify: coverage " << format_real(report.fraction_covered)
                  << "; min IoU " << format_real(report.min_iou) << " at gt "
                  << format_real(report.argmin.width) << "x" << format_real(report.argmin.height)
                  << "\n";
      }
      if (!args.grid_csv.empty()) {
        std::ostringstream csv;
        write_grid_csv(csv, report);
        write_text(args.grid_csv, csv.str());
      }
    } catch (const InvalidConfigError& e) {
      pass = false;
      coverage = {{"error", e.what()}};
      std::cerr << "verify: " << e.what() << "\n";
    }

    const Json doc = {{"t", canonical_number(t)},
                      {"k", canonical_number(args.k)},
                      {"threshold", canonical_number(args.iou)},
                      {"quadratic", quadratic},
                      {"case2", case2},
                      {"coverage", coverage},
                      {"pass", pass}};
    write_text(args.output, dump_canonical(doc));
    const RunManifest manifest = make_manifest("verify",
                                               {{"k", format_real(args.k)},
                                                {"iou", format_real(args.iou)},
                                                {"grid", args.grid}},
                                               {args.config});
    write_manifest(manifest, args.output);
    if (!args.grid_csv.empty()) write_manifest(manifest, args.grid_csv);
    return pass ? kExitOk : kExitGuaranteeFailed;
  });
}

int run_match(const MatchArgs& args) {
  return guarded("match", [&] {
    check_iou(args.iou);
    const AnchorConfig config = load_config(args.config);
    const std::vector<BoxRecord> records = load_boxes(args.boxes);
    std::vector<PlacedBox> gt;
    gt.reserve(records.size());
    for (const auto& r : records) gt.push_back({r.cx, r.cy, BoxShape(r.width, r.height)});

    const std::vector<TiledAnchor> anchors = tile_anchors(config);
    std::vector<MatchResult> results = match_placed(gt, anchors, config, args.iou);
    for (std::size_t i = 0; i < results.size(); ++i) results[i].gt_index = records[i].row;

    std::ostringstream csv;
    write_match_csv(csv, results);
    write_text(args.output, csv.str());
    write_manifest(make_manifest("match", {{"iou", format_real(args.iou)}},
                                 {args.config, args.boxes}),
                   args.output);
    return kExitOk;
  });
}

int run_scatter(const ScatterArgs& args) {
  return guarded("scatter", [&] {
    const AnchorConfig config = load_config(args.config);
    std::vector<fs::path> inputs{args.config};
    std::vector<BoxShape> gt;
    if (!args.boxes.empty()) {
      for (const auto& r : load_boxes(args.boxes)) gt.emplace_back(r.width, r.height);
      inputs.push_back(args.boxes);
    }
    const std::vector<ScatterPoint> points = scatter_data(config, gt);
    std::ostringstream text;
    const std::string ext = fs::path(args.output).extension().string();
    if (ext == ".svg") {
      write_scatter_svg(text, points);
    } else if (ext == ".csv") {
      write_scatter_csv(text, points);
    } else {
      throw std::invalid_argument("scatter output must end in .svg or .csv");
    }
    write_text(args.output, text.str());
    write_manifest(make_manifest("scatter", {{"format", ext.substr(1)}}, inputs), args.output);
    return kExitOk;
  });
}

int run_chain(const ChainArgs& args) {
  return guarded("chain", [&] {
    ArchitectureDescriptor arch{vgg16_detection_chain(), vgg16_detection_taps()};
    std::vector<fs::path> inputs;
    if (!args.arch.empty()) {
      open_input(args.arch);
      arch = architecture_from_json(read_json_file(args.arch));
      inputs.push_back(args.arch);
    }
    const ChainGeometry geometry = chain_geometry(arch.layers, arch.taps);
    write_text(args.output, dump_canonical(to_json(geometry)));
    write_manifest(make_manifest("chain", {{"arch", args.arch.empty() ? "builtin:vgg16" : args.arch}},
                                 inputs),
                   args.output);
    return kExitOk;
  });
}

}  // namespace anchorfit::cli
