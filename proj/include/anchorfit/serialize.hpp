#pragma once

/**
 * @file anchorfit/serialize.hpp
 * @brief Canonical file formats.
 *
 * JSON documents use sorted keys and reals rounded to 9 significant digits
 * (integral values are written as integers), so equal inputs give equal bytes.
 */

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "anchorfit/anchor_design.hpp"
#include "anchorfit/layerchain.hpp"
#include "anchorfit/matcher.hpp"
#include "anchorfit/oracle.hpp"
#include "anchorfit/recommend.hpp"
#include "anchorfit/stats_ingest.hpp"

namespace anchorfit {

using Json = nlohmann::json;

/// Real rounded to 9 significant digits; integral values become integers.
Json canonical_number(double value);

/// Two-space indented dump plus trailing newline.
std::string dump_canonical(const Json& doc);

Json to_json(const AnchorConfig& config);
/// Parses and validates; ARs below 1 snap to the reciprocal of a listed partner
/// and second-set sizes to sqrt(S_k S_{k+1}) (final: patch) when within 1e-6.
/// Throws ParseError or InvalidConfigError.
AnchorConfig config_from_json(const Json& doc);

/// Template: {patch_size?, layers: [{name, stride, anchor_size, receptive_field}]}.
std::vector<LayerSpec> template_from_json(const Json& doc, int* patch_size = nullptr);

Json to_json(const DatasetStats& stats);
DatasetStats stats_from_json(const Json& doc);

/// Architecture descriptor: {layers: [{name, kernel, stride, padding}], taps: [name...]}.
struct ArchitectureDescriptor {
  std::vector<ConvLayerDesc> layers;
  std::vector<std::string> taps;
};
ArchitectureDescriptor architecture_from_json(const Json& doc);
Json to_json(const ArchitectureDescriptor& arch);
Json to_json(const ChainGeometry& geometry);

Json to_json(const QuadraticCheck& check);
Json to_json(const GridSpec& grid);
Json to_json(const CoverageReport& report);
Json to_json(const Case2Report& report);
Json to_json(const Recommendation& rec);

/// Header gt_index,layer,anchor_index,iou,matched; matched as 1/0.
void write_match_csv(std::ostream& out, std::span<const MatchResult> results);
/// Header series,width,height.
void write_scatter_csv(std::ostream& out, std::span<const ScatterPoint> points);
/// Static width/height scatter; equal-AR anchor series joined by polylines.
void write_scatter_svg(std::ostream& out, std::span<const ScatterPoint> points);
/// Header size_index,ar_index,size,ar,width,height,iou.
void write_grid_csv(std::ostream& out, const CoverageReport& report);

Json read_json_file(const std::filesystem::path& path);

}  // namespace anchorfit
