#pragma once

/**
 * @file anchorfit/anchor_design.hpp
 * @brief Adaptive anchor pyramid design.
 *
 * Layer sizes follow a geometric progression. Every layer carries an AR set
 * closed under reciprocal; the largest AR in the pyramid (t) is derived from
 * the object AR bound k and the IoU threshold T. An optional second anchor set
 * places one square anchor between each pair of consecutive sizes.
 */

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "anchorfit/boxgeom.hpp"

namespace anchorfit {

struct DatasetStats;

struct LayerSpec {
  std::string name;
  int stride = 1;
  double anchor_size = 1.0;
  std::vector<double> aspect_ratios;  // 1 first, then ratios > 1 ascending, then reciprocals
  int receptive_field = 1;
};

struct AnchorConfig {
  std::vector<LayerSpec> layers;
  int patch_size = 0;
  bool double_set = false;
  std::vector<double> second_set_sizes;  // one per layer when double_set, else empty
};

enum class AnchorSet { kFirst = 0, kSecond = 1 };

/// Throws InvalidConfigError when a structural invariant does not hold:
/// positive strides/sizes, anchor_size < receptive_field, non-empty positive
/// AR sets, geometric sizes, and second-set sizes consistent with double_set.
void validate(const AnchorConfig& config);

/// Common ratio of consecutive anchor sizes; InvalidConfigError when the sizes
/// are not in geometric progression (relative tolerance 1e-9).
double size_ratio(std::span<const LayerSpec> layers);

/// The three lower bounds on t whose maximum is the max-AR criterion:
/// discriminant k*(2/(1+1/T))^2, lower endpoint T*k/(2-2T), upper endpoint T*k.
struct ArBounds {
  double discriminant;
  double lower_endpoint;
  double upper_endpoint;
};
ArBounds max_anchor_ar_bounds(double k, double T);

/// t = max of the three bounds, without the >= 1 clamp.
double max_anchor_ar_unclamped(double k, double T);

/// Largest anchor AR needed so that every object with AR <= k reaches IoU T
/// with its assigned layer; clamped to >= 1 (shapes are taken width >= height).
/// Throws std::invalid_argument unless k >= 1 and 0 < T < 1.
double max_anchor_ar(double k, double T);

/// AR set for a maximum ratio: {1, r..., 1/r...}. With two_ratios, sqrt(t)
/// snapped to the nearest 0.5 is added when it lies strictly between 1 and t.
std::vector<double> aspect_ratio_set(double max_ar, bool two_ratios);

/// S'_k = sqrt(S_k * S_{k+1}); the final entry is the patch size.
std::vector<double> second_set_sizes(std::span<const LayerSpec> layers, int patch_size);

struct DesignOptions {
  double first_layer_max_ar = 2.0;
  double last_layer_max_ar = 1.5;
  bool double_set = true;
};

/// Builds a config from a layer template (AR sets in the template are ignored).
AnchorConfig design_config(double mar_obj, double T, std::span<const LayerSpec> base,
                           int patch_size, const DesignOptions& options = {});
AnchorConfig design_config(const DatasetStats& stats, double T,
                           std::span<const LayerSpec> base, int patch_size,
                           const DesignOptions& options = {});

/// Five-layer template: strides 4..64, sizes 16..256, the reference RF column.
std::vector<LayerSpec> reference_template();
inline constexpr int kReferencePatchSize = 300;

/// Largest AR present in the config (t for a designed config).
double config_max_ar(const AnchorConfig& config);

/// One entry per distinct anchor profile in the config.
struct AnchorShape {
  std::size_t layer = 0;
  AnchorSet set = AnchorSet::kFirst;
  std::size_t slot = 0;  // position within the layer: first-set ARs, then the second-set square
  double ar = 1.0;
  BoxShape shape;
};

/// Layer order, first-set ARs in listed order, then the layer's second-set anchor.
std::vector<AnchorShape> anchor_shapes(const AnchorConfig& config);

/// Number of anchor profiles a layer contributes per center.
std::size_t shapes_per_center(const AnchorConfig& config, std::size_t layer);

struct TiledAnchor {
  PlacedBox box;
  std::size_t layer = 0;
  std::size_t index_in_layer = 0;
  std::size_t slot = 0;
  AnchorSet set = AnchorSet::kFirst;
  double ar = 1.0;
  int row = 0;
  int col = 0;
};

/// Anchor centers per axis for a layer: the feature-map cells fully inside the patch.
int centers_per_axis(int patch_size, int stride);

/// Tiles every layer over the patch. Centers sit at ((i+0.5)*stride, (m+0.5)*stride);
/// anchors may overhang the patch. Order: layer, row-major center, slot.
std::vector<TiledAnchor> tile_anchors(const AnchorConfig& config);

/// Cell (row, col) of the layer's dominant region containing the point; edge
/// cells extend to the patch border so every in-patch point has exactly one.
std::pair<int, int> dominant_cell(const AnchorConfig& config, std::size_t layer, double x,
                                  double y);

/// index_in_layer of the anchor with the given slot at a cell.
std::size_t tiled_index(const AnchorConfig& config, std::size_t layer, int row, int col,
                        std::size_t slot);

/// Short-side interval (lo, hi] over which the max-AR bound is guaranteed: the
/// octaves of layers that carry AR t and have a lower neighbour. Returns
/// nullopt-like {0, 0} when no layer qualifies.
std::pair<double, double> guaranteed_height_range(const AnchorConfig& config, double t);

struct ScatterPoint {
  std::string series;
  double width = 0.0;
  double height = 0.0;
};

/// Anchor profiles grouped into equal-AR series across scales ("ar=<value>"),
/// the second set as "second_set", then every GT shape as "gt".
std::vector<ScatterPoint> scatter_data(const AnchorConfig& config,
                                       std::span<const BoxShape> gt);

}  // namespace anchorfit
