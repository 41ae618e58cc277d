#include "anchorfit/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "anchorfit/errors.hpp"
#include "anchorfit/format.hpp"

namespace anchorfit {

namespace {

template <typename T>
T require(const Json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError(std::string("missing field '") + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T optional_field(const Json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  return require<T>(obj, key);
}

Json real_array(std::span<const double> values) {
  Json arr = Json::array();
  for (double v : values) arr.push_back(canonical_number(v));
  return arr;
}

Json percentile_map(const std::map<int, double>& values) {
  Json obj = Json::object();
  for (const auto& [p, v] : values) obj[std::to_string(p)] = canonical_number(v);
  return obj;
}

std::map<int, double> percentile_map_from(const Json& obj) {
  std::map<int, double> out;
  for (const auto& [key, value] : obj.items()) out[std::stoi(key)] = value.get<double>();
  return out;
}

Json grid_point(const GridPoint& p, bool with_offset) {
  Json j = {{"size_index", p.size_index},
            {"ar_index", p.ar_index},
            {"size", canonical_number(p.size)},
            {"ar", canonical_number(p.ar)},
            {"width", canonical_number(p.width)},
            {"height", canonical_number(p.height)}};
  if (with_offset) {
    j["offset_x"] = canonical_number(p.offset_x);
    j["offset_y"] = canonical_number(p.offset_y);
  }
  return j;
}

Json shape_json(const BoxShape& s) {
  return {{"width", canonical_number(s.width())}, {"height", canonical_number(s.height())}};
}

}  // namespace

Json canonical_number(double value) {
  const double rounded = std::stod(format_real(value));
  if (std::abs(rounded) < 9.0e15 && rounded == std::trunc(rounded)) {
    return static_cast<long long>(rounded);
  }
  return rounded;
}

std::string dump_canonical(const Json& doc) { return doc.dump(2) + "\n"; }

Json to_json(const AnchorConfig& config) {
  Json layers = Json::array();
  for (const auto& l : config.layers) {
    layers.push_back({{"name", l.name},
                      {"stride", l.stride},
                      {"anchor_size", canonical_number(l.anchor_size)},
                      {"aspect_ratios", real_array(l.aspect_ratios)},
                      {"receptive_field", l.receptive_field}});
  }
  return {{"patch_size", config.patch_size},
          {"double_set", config.double_set},
          {"layers", layers},
          {"second_set_sizes", real_array(config.second_set_sizes)}};
}

std::vector<LayerSpec> template_from_json(const Json& doc, int* patch_size) {
  if (patch_size) *patch_size = optional_field<int>(doc, "patch_size", kReferencePatchSize);
  const Json layers = require<Json>(doc, "layers");
  if (!layers.is_array()) throw ParseError("'layers' must be an array");
  std::vector<LayerSpec> out;
  for (const auto& l : layers) {
    LayerSpec spec;
    spec.name = require<std::string>(l, "name");
    spec.stride = require<int>(l, "stride");
    spec.anchor_size = require<double>(l, "anchor_size");
    spec.receptive_field = require<int>(l, "receptive_field");
    spec.aspect_ratios = optional_field<std::vector<double>>(l, "aspect_ratios", {1.0});
    out.push_back(std::move(spec));
  }
  return out;
}

AnchorConfig config_from_json(const Json& doc) {
  AnchorConfig config;
  config.layers = template_from_json(doc, &config.patch_size);
  config.patch_size = require<int>(doc, "patch_size");
  config.double_set = require<bool>(doc, "double_set");
  config.second_set_sizes = optional_field<std::vector<double>>(doc, "second_set_sizes", {});

  for (auto& layer : config.layers) {
    std::vector<double> snapped = layer.aspect_ratios;
    for (double& ar : snapped) {
      if (!(ar > 0.0 && ar < 1.0)) continue;
      for (double partner : layer.aspect_ratios) {
        if (partner > 1.0 && std::abs(ar * partner - 1.0) <= 1e-6) {
          ar = 1.0 / partner;
          break;
        }
      }
    }
    layer.aspect_ratios = std::move(snapped);
  }
  if (config.double_set && config.second_set_sizes.size() == config.layers.size()) {
    const std::vector<double> expected = second_set_sizes(config.layers, config.patch_size);
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (std::abs(config.second_set_sizes[i] - expected[i]) > 1e-6 * expected[i]) {
        throw InvalidConfigError("second-set size " + std::to_string(i) +
                                 " does not equal sqrt(S_k * S_k+1) (or the patch size)");
      }
      config.second_set_sizes[i] = expected[i];
    }
  }
  validate(config);
  return config;
}

Json to_json(const DatasetStats& stats) {
  return {{"count", stats.count},
          {"rejected", stats.rejected},
          {"ar_percentiles", percentile_map(stats.ar_percentiles)},
          {"size_percentiles", percentile_map(stats.size_percentiles)},
          {"mar_obj", canonical_number(stats.mar_obj)},
          {"size_range", {canonical_number(stats.size_min), canonical_number(stats.size_max)}}};
}

DatasetStats stats_from_json(const Json& doc) {
  DatasetStats stats;
  stats.count = require<std::size_t>(doc, "count");
  stats.rejected = optional_field<std::size_t>(doc, "rejected", 0);
  stats.ar_percentiles = percentile_map_from(require<Json>(doc, "ar_percentiles"));
  stats.size_percentiles = percentile_map_from(require<Json>(doc, "size_percentiles"));
  stats.mar_obj = require<double>(doc, "mar_obj");
  const auto range = require<std::vector<double>>(doc, "size_range");
  if (range.size() != 2) throw ParseError("size_range must hold two values");
  stats.size_min = range[0];
  stats.size_max = range[1];
  if (!(stats.mar_obj >= 1.0)) throw ParseError("mar_obj must be >= 1");
  return stats;
}

ArchitectureDescriptor architecture_from_json(const Json& doc) {
  ArchitectureDescriptor arch;
  const Json layers = require<Json>(doc, "layers");
  if (!layers.is_array()) throw ParseError("'layers' must be an array");
  for (const auto& l : layers) {
    arch.layers.push_back({require<std::string>(l, "name"), require<int>(l, "kernel"),
                           require<int>(l, "stride"), optional_field<int>(l, "padding", 0)});
  }
  arch.taps = require<std::vector<std::string>>(doc, "taps");
  return arch;
}

Json to_json(const ArchitectureDescriptor& arch) {
  Json layers = Json::array();
  for (const auto& l : arch.layers) {
    layers.push_back(
        {{"name", l.name}, {"kernel", l.kernel}, {"stride", l.stride}, {"padding", l.padding}});
  }
  return {{"layers", layers}, {"taps", arch.taps}};
}

Json to_json(const ChainGeometry& geometry) {
  Json taps = Json::array();
  for (const auto& t : geometry.taps) {
    taps.push_back({{"name", t.name}, {"jump", t.jump}, {"receptive_field", t.receptive_field}});
  }
  return {{"taps", taps}};
}

Json to_json(const QuadraticCheck& c) {
  Json j = {{"k", canonical_number(c.k)},
            {"threshold", canonical_number(c.threshold)},
            {"t", canonical_number(c.t)},
            {"layer_size", canonical_number(c.layer_size)},
            {"discriminant", canonical_number(c.discriminant)},
            {"h_low", canonical_number(c.h_low)},
            {"h_high", canonical_number(c.h_high)},
            {"f_low", canonical_number(c.f_low)},
            {"f_high", canonical_number(c.f_high)},
            {"discriminant_ok", c.discriminant_ok},
            {"low_ok", c.low_ok},
            {"high_ok", c.high_ok},
            {"pass", c.pass}};
  j["witness"] = c.witness ? shape_json(*c.witness) : Json(nullptr);
  return j;
}

Json to_json(const GridSpec& g) {
  return {{"size_min", canonical_number(g.size_min)}, {"size_max", canonical_number(g.size_max)},
          {"size_steps", g.size_steps},               {"ar_min", canonical_number(g.ar_min)},
          {"ar_max", canonical_number(g.ar_max)},     {"ar_steps", g.ar_steps},
          {"offset_steps", g.offset_steps}};
}

Json to_json(const CoverageReport& r) {
  Json layers = Json::array();
  for (const auto& l : r.layers) {
    layers.push_back({{"layer", l.layer}, {"best_count", l.best_count}, {"iou_bins", l.iou_bins}});
  }
  Json j = {{"grid", to_json(r.grid)},
            {"k", canonical_number(r.k)},
            {"threshold", canonical_number(r.threshold)},
            {"points", r.points},
            {"covered", r.covered},
            {"fraction_covered", canonical_number(r.fraction_covered)},
            {"min_iou", canonical_number(r.min_iou)},
            {"argmin", grid_point(r.argmin, false)},
            {"layers", layers}};
  if (r.offsets) {
    j["offsets"] = {{"points", r.offsets->points},
                    {"covered", r.offsets->covered},
                    {"fraction_covered", canonical_number(r.offsets->fraction_covered)},
                    {"min_iou", canonical_number(r.offsets->min_iou)},
                    {"argmin", grid_point(r.offsets->argmin, true)}};
  }
  return j;
}

Json to_json(const Case2Report& r) {
  Json witnesses = Json::array();
  for (const auto& w : r.witnesses) {
    witnesses.push_back({{"lower_layer", w.lower_layer},
                         {"upper_layer", w.upper_layer},
                         {"size", canonical_number(w.size)},
                         {"ar", canonical_number(w.ar)},
                         {"width", canonical_number(w.width)},
                         {"height", canonical_number(w.height)},
                         {"iou_lower", canonical_number(w.iou_lower)},
                         {"iou_upper", canonical_number(w.iou_upper)}});
  }
  return {{"t", canonical_number(r.t)},
          {"threshold", canonical_number(r.threshold)},
          {"size_steps", r.size_steps},
          {"ar_steps", r.ar_steps},
          {"points", r.points},
          {"counterexamples", r.counterexamples},
          {"min_iou", canonical_number(r.min_iou)},
          {"witnesses", witnesses},
          {"subcase_a_points", r.subcase_a_points},
          {"subcase_b_points", r.subcase_b_points},
          {"subcase_designated_failures", r.subcase_designated_failures},
          {"enclosure_premise_violations", r.enclosure_premise_violations},
          {"area_identity_mismatches", r.area_identity_mismatches},
          {"pass", r.pass}};
}

Json to_json(const Recommendation& rec) {
  return {{"mar_obj", canonical_number(rec.mar_obj)},
          {"max_anchor_ar", canonical_number(rec.max_anchor_ar)},
          {"suggested_sizes", real_array(rec.suggested_sizes)},
          {"guaranteed_size_range",
           {canonical_number(rec.guaranteed_size_min), canonical_number(rec.guaranteed_size_max)}},
          {"config", to_json(rec.config)},
          {"warnings", rec.warnings}};
}

void write_match_csv(std::ostream& out, std::span<const MatchResult> results) {
  out << "gt_index,layer,anchor_index,iou,matched\n";
  for (const auto& r : results) {
    out << r.gt_index << ',' << r.layer << ',' << r.anchor_index << ',' << format_real(r.iou)
        << ',' << (r.matched ? 1 : 0) << '\n';
  }
}

void write_scatter_csv(std::ostream& out, std::span<const ScatterPoint> points) {
  out << "series,width,height\n";
  for (const auto& p : points) {
    out << p.series << ',' << format_real(p.width) << ',' << format_real(p.height) << '\n';
  }
}

void write_grid_csv(std::ostream& out, const CoverageReport& report) {
  out << "size_index,ar_index,size,ar,width,height,iou\n";
  if (report.grid_iou.empty()) return;
  const int M = report.grid.ar_steps;
  for (int i = 0; i < report.grid.size_steps; ++i) {
    const double size = grid_size(report.grid, i);
    for (int m = 0; m < M; ++m) {
      const double ar = grid_ar(report.grid, m);
      out << i << ',' << m << ',' << format_real(size) << ',' << format_real(ar) << ','
          << format_real(size * std::sqrt(ar)) << ',' << format_real(size / std::sqrt(ar)) << ','
          << format_real(report.grid_iou[static_cast<std::size_t>(i) * M + m]) << '\n';
    }
  }
}

void write_scatter_svg(std::ostream& out, std::span<const ScatterPoint> points) {
  constexpr double kSize = 640.0;
  constexpr double kMargin = 60.0;
  constexpr double kPlot = kSize - 2.0 * kMargin;
  static constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                             "#9467bd", "#8c564b", "#e377c2", "#17becf"};

  double extent = 1.0;
  for (const auto& p : points) extent = std::max({extent, p.width, p.height});
  // Round the axis up to a multiple of a power-of-ten step.
  const double step = std::pow(10.0, std::floor(std::log10(extent)));
  const double axis_max = std::ceil(extent / step) * step;

  const auto coord = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return std::string(buf);
  };
  const auto px = [&](double w) { return coord(kMargin + w / axis_max * kPlot); };
  const auto py = [&](double h) { return coord(kSize - kMargin - h / axis_max * kPlot); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"640\" "
         "viewBox=\"0 0 640 640\">\n";
  out << "<rect width=\"640\" height=\"640\" fill=\"white\"/>\n";
  out << "<g stroke=\"#444\" stroke-width=\"1\">\n";
  out << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(axis_max)
      << "\" y2=\"" << py(0) << "\"/>\n";
  out << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(0) << "\" y2=\""
      << py(axis_max) << "\"/>\n";
  out << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#222\">\n";
  for (double v = 0.0; v <= axis_max * (1.0 + 1e-12); v += step) {
    out << "<text x=\"" << px(v) << "\" y=\"" << coord(kSize - kMargin + 16)
        << "\" text-anchor=\"middle\">" << format_real(v) << "</text>\n";
    out << "<text x=\"" << coord(kMargin - 6) << "\" y=\"" << py(v)
        << "\" text-anchor=\"end\">" << format_real(v) << "</text>\n";
  }
  out << "<text x=\"320\" y=\"628\" text-anchor=\"middle\">width (px)</text>\n";
  out << "<text x=\"16\" y=\"320\" text-anchor=\"middle\" transform=\"rotate(-90 16 320)\">"
         "height (px)</text>\n</g>\n";

  out << "<g fill=\"black\" fill-opacity=\"0.5\">\n";
  for (const auto& p : points) {
    if (p.series != "gt") continue;
    out << "<circle cx=\"" << px(p.width) << "\" cy=\"" << py(p.height) << "\" r=\"1.5\"/>\n";
  }
  out << "</g>\n";

  std::vector<std::string> series;
  for (const auto& p : points) {
    if (p.series != "gt" && std::find(series.begin(), series.end(), p.series) == series.end()) {
      series.push_back(p.series);
    }
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const std::string color =
        series[s] == "second_set" ? "#7f7f7f" : kPalette[s % std::size(kPalette)];
    out << "<g data-series=\"" << series[s] << "\" stroke=\"" << color << "\" fill=\"" << color
        << "\">\n<polyline fill=\"none\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (const auto& p : points) {
      if (p.series != series[s]) continue;
      out << (first ? "" : " ") << px(p.width) << ',' << py(p.height);
      first = false;
    }
    out << "\"/>\n";
    for (const auto& p : points) {
      if (p.series != series[s]) continue;
      out << "<circle cx=\"" << px(p.width) << "\" cy=\"" << py(p.height) << "\" r=\"4\"/>\n";
    }
    out << "</g>\n";
  }
  out << "</svg>\n";
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace anchorfit
