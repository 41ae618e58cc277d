#pragma once

/**
 * @file anchorfit/matcher.hpp
 * @brief Ground-truth to layer and anchor assignment.
 *
 * Ties between equal IoUs (within kIouTolerance) resolve to the lowest layer,
 * then the AR closest to 1 (|log ar|), then the first set, then listed AR order
 * and finally row-major center order.
 */

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "anchorfit/anchor_design.hpp"
#include "anchorfit/boxgeom.hpp"

namespace anchorfit {

/// Layer j such that size_{j-1}/sqrt(t) < h <= size_j/sqrt(t), with h the short
/// side of gt; short sides below the first interval go to the first layer and
/// above the last to the last.
std::size_t assign_layer(const BoxShape& gt, const AnchorConfig& config, double t);

bool is_matched(double iou, double T) noexcept;

struct ConcentricMatch {
  std::size_t layer = 0;
  std::string layer_name;
  AnchorSet set = AnchorSet::kFirst;
  std::size_t slot = 0;
  double ar = 1.0;
  BoxShape anchor{1.0, 1.0};
  double iou = 0.0;
  bool matched = false;
};

/// Best anchor profile over all layers, ARs and sets by concentric IoU.
ConcentricMatch match_concentric(const BoxShape& gt, const AnchorConfig& config, double T);

struct MatchResult {
  std::size_t gt_index = 0;
  std::string layer;              // empty when unmatched because the box lies outside
  long long anchor_index = -1;    // index_in_layer of the best anchor
  double iou = 0.0;
  bool matched = false;
  long long dominant_anchor_index = -1;  // concentric-best profile at the GT's dominant cell
  double dominant_iou = 0.0;
};

/// Per-GT max IoU over all tiled anchors (no exclusivity). GT boxes lying fully
/// outside the patch are reported unmatched with IoU 0. Output follows input order.
std::vector<MatchResult> match_placed(std::span<const PlacedBox> gt,
                                      std::span<const TiledAnchor> anchors,
                                      const AnchorConfig& config, double T,
                                      unsigned threads = 0);

}  // namespace anchorfit
