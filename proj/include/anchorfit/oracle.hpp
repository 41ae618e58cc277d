#pragma once

/**
 * @file anchorfit/oracle.hpp
 * @brief Brute-force checks of the anchor coverage guarantees.
 *
 * Everything here evaluates IoU numerically over dense grids and never calls
 * the closed-form max-AR criterion, so it can serve as ground truth for it.
 * Shapes are taken landscape (width >= height) throughout.
 */

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "anchorfit/anchor_design.hpp"
#include "anchorfit/boxgeom.hpp"

namespace anchorfit {

/// IoU of a gt spanning the anchor horizontally while lying inside it
/// vertically: I = h*W, U = w*h + W*H - I. Equals concentric_iou when w >= W
/// and h <= H; outside that regime it is the model value, not the geometry.
double edge_intersection_iou(double w, double h, double anchor_w, double anchor_h) noexcept;

struct QuadraticCheck {
  double k = 0.0;
  double threshold = 0.0;
  double t = 0.0;
  double layer_size = 0.0;
  double discriminant = 0.0;
  double h_low = 0.0;   // layer_size / (2 sqrt t), open end of the octave
  double h_high = 0.0;  // layer_size / sqrt t
  double f_low = 0.0;
  double f_high = 0.0;
  bool discriminant_ok = false;
  bool low_ok = false;
  bool high_ok = false;
  bool pass = false;
  std::optional<BoxShape> witness;  // gt (k*h, h) at the first failing endpoint
};

/**
 * Checks the feasibility quadratic f(h) = T k h^2 - (T+1) s sqrt(t) h + T s^2 <= 0
 * for an octave of a ratio-2 pyramid at anchor size s: the discriminant
 * s^2 [(T+1)^2 t - 4 T^2 k] >= 0 and f <= 0 at both ends of (s/(2 sqrt t), s/sqrt t].
 * Comparisons allow 1e-9 * s^2 of rounding.
 */
QuadraticCheck verify_quadratic(double k, double T, double t, double layer_size);

/**
 * Smallest t >= 1 such that, for every h in an octave (S/(2 sqrt t), S/sqrt t]
 * and every AR a in [1, k], the edge-intersection IoU of gt (a h, h) against the
 * anchor (S sqrt t, S/sqrt t) is at least T. Found by bisection to 1e-10 over
 * an (h, AR) grid that includes both octave ends.
 */
double min_feasible_t(double k, double T, int h_steps = 2048, int ar_steps = 16);

struct GridSpec {
  double size_min = 0.0;  // geometric-mean size sqrt(w h); open lower end
  double size_max = 0.0;
  int size_steps = 512;   // log-spaced
  double ar_min = 1.0;
  double ar_max = 1.0;
  int ar_steps = 256;     // linear, both ends included
  int offset_steps = 0;   // per axis over [0, stride/2]; 0 disables the offset pass
};

/// Validates a grid; std::invalid_argument when degenerate.
void validate(const GridSpec& grid);

double grid_size(const GridSpec& grid, int i);
double grid_ar(const GridSpec& grid, int m);

/// Size axis spanning the guaranteed octaves for AR-k objects
/// ((h_lo sqrt k, h_hi sqrt k]) and AR axis [1, k]. InvalidConfigError when the
/// config has no guaranteed octave.
GridSpec guaranteed_grid(const AnchorConfig& config, double k, int size_steps = 512,
                         int ar_steps = 256, int offset_steps = 0);

struct GridPoint {
  int size_index = 0;
  int ar_index = 0;
  double size = 0.0;
  double ar = 0.0;
  double width = 0.0;
  double height = 0.0;
  double offset_x = 0.0;  // fraction of stride/2, offset pass only
  double offset_y = 0.0;
};

struct LayerHistogram {
  std::string layer;
  std::size_t best_count = 0;       // grid points whose best anchor is in this layer
  std::vector<std::size_t> iou_bins;  // 10 bins over [0, 1] of those points' best IoU
};

struct OffsetSummary {
  std::size_t points = 0;
  std::size_t covered = 0;
  double fraction_covered = 0.0;
  double min_iou = 1.0;
  GridPoint argmin;
};

struct CoverageReport {
  GridSpec grid;
  double k = 0.0;
  double threshold = 0.0;
  std::size_t points = 0;
  std::size_t covered = 0;
  double fraction_covered = 0.0;
  double min_iou = 1.0;
  GridPoint argmin;
  std::vector<LayerHistogram> layers;
  std::optional<OffsetSummary> offsets;
  std::vector<double> grid_iou;  // row-major (size, AR) when requested
};

/**
 * Concentric max IoU over every anchor profile of the config for each grid
 * point; min/argmin break ties by lexicographic grid index. With offset_steps,
 * a second pass shifts the gt by (fx, fy) * stride/2 from each anchor's center
 * (stride of that anchor's layer). The offset pass is descriptive only.
 */
CoverageReport coverage_sweep(const AnchorConfig& config, double k, double T,
                              const GridSpec& grid, bool keep_grid = false,
                              unsigned threads = 0);

struct Case2Witness {
  std::string lower_layer;
  std::string upper_layer;
  double size = 0.0;
  double ar = 0.0;
  double width = 0.0;
  double height = 0.0;
  double iou_lower = 0.0;
  double iou_upper = 0.0;
};

struct Case2Report {
  double t = 0.0;
  double threshold = 0.0;
  int size_steps = 0;
  int ar_steps = 0;
  std::size_t points = 0;
  std::size_t counterexamples = 0;
  double min_iou = 1.0;
  std::vector<Case2Witness> witnesses;  // first 16 counterexamples
  // Diagnostics on the area argument, logged rather than asserted:
  std::size_t subcase_a_points = 0;  // a <= 2 A_{j-1}
  std::size_t subcase_b_points = 0;  // a > 2 A_{j-1}
  std::size_t subcase_designated_failures = 0;
  std::size_t enclosure_premise_violations = 0;
  std::size_t area_identity_mismatches = 0;
  bool pass = false;
};

/**
 * For every consecutive layer pair (j-1, j) and every gt with area in
 * (A_{j-1}, A_j] and AR in [1, t), checks that the best concentric IoU over the
 * two layers' anchors (first-set ARs and second-set squares) reaches T.
 * UnsupportedConfigError unless consecutive sizes double.
 */
Case2Report verify_case2(const AnchorConfig& config, double t, double T = 0.5,
                         int size_steps = 512, int ar_steps = 256);

/// For gt enclosed by anchor (size, t): the AR t' < t at which the anchor's
/// width meets the gt's width (edge intersection at equal size), found by
/// bisection. nullopt when gt is not enclosed.
std::optional<double> edge_transform_ar(const BoxShape& gt, double size, double t);

}  // namespace anchorfit
