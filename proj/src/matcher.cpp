#include "anchorfit/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "anchorfit/parallel.hpp"

namespace anchorfit {

namespace {

// |log ar| quantized so that r and 1/r share a key despite rounding.
long long ar_distance_key(double ar) { return std::llround(std::abs(std::log(ar)) * 1e9); }

bool outside_patch(const PlacedBox& box, int patch) {
  return box.right() <= 0.0 || box.bottom() <= 0.0 || box.left() >= patch ||
         box.top() >= patch;
}

}  // namespace

bool is_matched(double iou, double T) noexcept { return iou >= T - kIouTolerance; }

std::size_t assign_layer(const BoxShape& gt, const AnchorConfig& config, double t) {
  const double h = gt.landscape().height();
  const double root = std::sqrt(t);
  for (std::size_t j = 0; j < config.layers.size(); ++j) {
    if (h <= config.layers[j].anchor_size / root) return j;
  }
  return config.layers.size() - 1;
}

ConcentricMatch match_concentric(const BoxShape& gt, const AnchorConfig& config, double T) {
  std::vector<AnchorShape> shapes = anchor_shapes(config);
  std::stable_sort(shapes.begin(), shapes.end(), [](const AnchorShape& a, const AnchorShape& b) {
    return std::tuple(a.layer, ar_distance_key(a.ar), a.set, a.slot) <
           std::tuple(b.layer, ar_distance_key(b.ar), b.set, b.slot);
  });

  const AnchorShape* best = nullptr;
  double best_iou = -1.0;
  for (const auto& s : shapes) {
    const double v = concentric_iou(gt, s.shape);
    if (v > best_iou + kIouTolerance) {
      best_iou = v;
      best = &s;
    }
  }
  ConcentricMatch m;
  m.layer = best->layer;
  m.layer_name = config.layers[best->layer].name;
  m.set = best->set;
  m.slot = best->slot;
  m.ar = best->ar;
  m.anchor = best->shape;
  m.iou = best_iou;
  m.matched = is_matched(best_iou, T);
  return m;
}

std::vector<MatchResult> match_placed(std::span<const PlacedBox> gt,
                                      std::span<const TiledAnchor> anchors,
                                      const AnchorConfig& config, double T, unsigned threads) {
  std::vector<std::size_t> order(anchors.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const TiledAnchor& x = anchors[a];
    const TiledAnchor& y = anchors[b];
    return std::tuple(x.layer, ar_distance_key(x.ar), x.set, x.slot, x.row, x.col) <
           std::tuple(y.layer, ar_distance_key(y.ar), y.set, y.slot, y.row, y.col);
  });

  std::vector<MatchResult> out(gt.size());
  parallel_for(
      gt.size(),
      [&](std::size_t g) {
        const PlacedBox& box = gt[g];
        MatchResult& r = out[g];
        r.gt_index = g;
        if (outside_patch(box, config.patch_size) || anchors.empty()) return;

        const TiledAnchor* best = nullptr;
        double best_iou = -1.0;
        for (std::size_t idx : order) {
          const double v = iou(box, anchors[idx].box);
          if (v > best_iou + kIouTolerance) {
            best_iou = v;
            best = &anchors[idx];
          }
        }
        r.layer = config.layers[best->layer].name;
        r.anchor_index = static_cast<long long>(best->index_in_layer);
        r.iou = best_iou;
        r.matched = is_matched(best_iou, T);

        const ConcentricMatch cm = match_concentric(box.shape, config, T);
        const auto [row, col] = dominant_cell(config, cm.layer, box.cx, box.cy);
        const double stride = config.layers[cm.layer].stride;
        const PlacedBox dominant{(col + 0.5) * stride, (row + 0.5) * stride, cm.anchor};
        r.dominant_anchor_index =
            static_cast<long long>(tiled_index(config, cm.layer, row, col, cm.slot));
        r.dominant_iou = iou(box, dominant);
      },
      threads);
  return out;
}

}  // namespace anchorfit
