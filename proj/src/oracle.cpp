#include "anchorfit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "anchorfit/errors.hpp"
#include "anchorfit/matcher.hpp"
#include "anchorfit/parallel.hpp"

namespace anchorfit {

namespace {

constexpr std::size_t kIouBins = 10;
constexpr std::size_t kMaxWitnesses = 16;

std::size_t iou_bin(double v) {
  return std::min(kIouBins - 1, static_cast<std::size_t>(std::max(0.0, v) * kIouBins));
}

// Offset pass: gt shifted by (dx, dy) from an anchor at the origin.
double offset_iou(const BoxShape& gt, double dx, double dy, const BoxShape& anchor) {
  return iou(PlacedBox{dx, dy, gt}, PlacedBox{0.0, 0.0, anchor});
}

struct RowSummary {
  std::size_t covered = 0;
  double min_iou = 2.0;
  int argmin_ar = 0;
  std::vector<std::size_t> best_count;
  std::vector<std::vector<std::size_t>> bins;
};

struct OffsetRow {
  std::size_t covered = 0;
  double min_iou = 2.0;
  GridPoint argmin;
};

}  // namespace

double edge_intersection_iou(double w, double h, double anchor_w, double anchor_h) noexcept {
  const double inter = h * anchor_w;
  return inter / (w * h + anchor_w * anchor_h - inter);
}

QuadraticCheck verify_quadratic(double k, double T, double t, double layer_size) {
  if (!(T > 0.0 && T < 1.0)) throw std::invalid_argument("threshold must lie in (0, 1)");
  if (!(k > 0.0 && t > 0.0 && layer_size > 0.0)) {
    throw std::invalid_argument("k, t and layer size must be positive");
  }
  const double s = layer_size;
  const double root = std::sqrt(t);
  const auto f = [&](double h) { return T * k * h * h - (T + 1.0) * s * root * h + T * s * s; };
  const double tol = 1e-9 * s * s;

  QuadraticCheck c;
  c.k = k;
  c.threshold = T;
  c.t = t;
  c.layer_size = s;
  c.discriminant = s * s * ((T + 1.0) * (T + 1.0) * t - 4.0 * T * T * k);
  c.h_low = s / (2.0 * root);
  c.h_high = s / root;
  c.f_low = f(c.h_low);
  c.f_high = f(c.h_high);
  c.discriminant_ok = c.discriminant >= -tol;
  c.low_ok = c.f_low <= tol;
  c.high_ok = c.f_high <= tol;
  c.pass = c.discriminant_ok && c.low_ok && c.high_ok;
  if (!c.low_ok) {
    c.witness = BoxShape(k * c.h_low, c.h_low);
  } else if (!c.high_ok) {
    c.witness = BoxShape(k * c.h_high, c.h_high);
  }
  return c;
}

double min_feasible_t(double k, double T, int h_steps, int ar_steps) {
  if (!(T > 0.0 && T < 1.0)) throw std::invalid_argument("threshold must lie in (0, 1)");
  if (!(k >= 1.0)) throw std::invalid_argument("k must be >= 1");
  if (h_steps < 1 || ar_steps < 1) throw std::invalid_argument("grid needs at least one step");

  // Layer size 1: the octave scales with the anchor, so one octave stands for all.
  const auto feasible = [&](double t) {
    const double aw = std::sqrt(t);
    const double ah = 1.0 / aw;
    const double lo = 0.5 * ah;
    for (int i = 0; i <= h_steps; ++i) {
      const double h = lo + (ah - lo) * i / h_steps;
      for (int m = 0; m < ar_steps; ++m) {
        const double a = ar_steps == 1 ? k : 1.0 + (k - 1.0) * (m + 1) / ar_steps;
        if (edge_intersection_iou(a * h, h, aw, ah) < T - 1e-12) return false;
      }
    }
    return true;
  };

  if (feasible(1.0)) return 1.0;
  double lo = 1.0;
  double hi = 2.0;
  while (!feasible(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e9) throw std::runtime_error("no feasible anchor AR found");
  }
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return hi;
}

void validate(const GridSpec& grid) {
  if (!(grid.size_min > 0.0 && grid.size_max > grid.size_min)) {
    throw std::invalid_argument("grid size range must satisfy 0 < min < max");
  }
  if (!(grid.ar_min >= 1.0 && grid.ar_max >= grid.ar_min)) {
    throw std::invalid_argument("grid AR range must satisfy 1 <= min <= max");
  }
  if (grid.size_steps < 1 || grid.ar_steps < 1) {
    throw std::invalid_argument("grid needs at least one size step and one AR step");
  }
  if (grid.offset_steps < 0 || grid.offset_steps == 1) {
    throw std::invalid_argument("offset steps must be 0 (off) or >= 2");
  }
}

double grid_size(const GridSpec& grid, int i) {
  return grid.size_min *
         std::pow(grid.size_max / grid.size_min, static_cast<double>(i + 1) / grid.size_steps);
}

double grid_ar(const GridSpec& grid, int m) {
  if (grid.ar_steps == 1) return grid.ar_min;
  return grid.ar_min + (grid.ar_max - grid.ar_min) * m / (grid.ar_steps - 1);
}

GridSpec guaranteed_grid(const AnchorConfig& config, double k, int size_steps, int ar_steps,
                         int offset_steps) {
  const auto [h_lo, h_hi] = guaranteed_height_range(config, config_max_ar(config));
  if (!(h_hi > h_lo && h_lo > 0.0)) {
    throw InvalidConfigError("config has no layer pair with a guaranteed octave");
  }
  GridSpec grid;
  grid.size_min = h_lo * std::sqrt(k);
  grid.size_max = h_hi * std::sqrt(k);
  grid.size_steps = size_steps;
  grid.ar_min = 1.0;
  grid.ar_max = k;
  grid.ar_steps = k > 1.0 ? ar_steps : 1;
  grid.offset_steps = offset_steps;
  return grid;
}

CoverageReport coverage_sweep(const AnchorConfig& config, double k, double T,
                              const GridSpec& grid, bool keep_grid, unsigned threads) {
  validate(config);
  validate(grid);
  const std::vector<AnchorShape> shapes = anchor_shapes(config);
  const std::size_t n_layers = config.layers.size();
  const auto N = static_cast<std::size_t>(grid.size_steps);
  const auto M = static_cast<std::size_t>(grid.ar_steps);

  CoverageReport report;
  report.grid = grid;
  report.k = k;
  report.threshold = T;
  report.points = N * M;
  if (keep_grid) report.grid_iou.assign(N * M, 0.0);

  const auto point = [&](int i, int m) {
    GridPoint p;
    p.size_index = i;
    p.ar_index = m;
    p.size = grid_size(grid, i);
    p.ar = grid_ar(grid, m);
    p.width = p.size * std::sqrt(p.ar);
    p.height = p.size / std::sqrt(p.ar);
    return p;
  };

  std::vector<RowSummary> rows(N);
  parallel_for(
      N,
      [&](std::size_t i) {
        RowSummary& row = rows[i];
        row.best_count.assign(n_layers, 0);
        row.bins.assign(n_layers, std::vector<std::size_t>(kIouBins, 0));
        for (std::size_t m = 0; m < M; ++m) {
          const GridPoint p = point(static_cast<int>(i), static_cast<int>(m));
          const BoxShape gt(p.width, p.height);
          double best = -1.0;
          std::size_t best_layer = 0;
          for (const auto& s : shapes) {
            const double v = concentric_iou(gt, s.shape);
            if (v > best) {
              best = v;
              best_layer = s.layer;
            }
          }
          if (keep_grid) report.grid_iou[i * M + m] = best;
          if (is_matched(best, T)) ++row.covered;
          if (best < row.min_iou) {
            row.min_iou = best;
            row.argmin_ar = static_cast<int>(m);
          }
          ++row.best_count[best_layer];
          ++row.bins[best_layer][iou_bin(best)];
        }
      },
      threads);

  report.layers.resize(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    report.layers[l].layer = config.layers[l].name;
    report.layers[l].iou_bins.assign(kIouBins, 0);
  }
  report.min_iou = 2.0;
  for (std::size_t i = 0; i < N; ++i) {
    const RowSummary& row = rows[i];
    report.covered += row.covered;
    if (row.min_iou < report.min_iou) {
      report.min_iou = row.min_iou;
      report.argmin = point(static_cast<int>(i), row.argmin_ar);
    }
    for (std::size_t l = 0; l < n_layers; ++l) {
      report.layers[l].best_count += row.best_count[l];
      for (std::size_t b = 0; b < kIouBins; ++b) report.layers[l].iou_bins[b] += row.bins[l][b];
    }
  }
  report.fraction_covered =
      static_cast<double>(report.covered) / static_cast<double>(report.points);

  if (grid.offset_steps >= 2) {
    const auto U = static_cast<std::size_t>(grid.offset_steps);
    std::vector<OffsetRow> orows(N);
    parallel_for(
        N,
        [&](std::size_t i) {
          OffsetRow& row = orows[i];
          for (std::size_t m = 0; m < M; ++m) {
            const GridPoint base = point(static_cast<int>(i), static_cast<int>(m));
            const BoxShape gt(base.width, base.height);
            for (std::size_t u = 0; u < U; ++u) {
              const double fx = static_cast<double>(u) / (U - 1);
              for (std::size_t v = 0; v < U; ++v) {
                const double fy = static_cast<double>(v) / (U - 1);
                double best = 0.0;
                for (const auto& s : shapes) {
                  const double half = 0.5 * config.layers[s.layer].stride;
                  best = std::max(best, offset_iou(gt, fx * half, fy * half, s.shape));
                }
                if (is_matched(best, T)) ++row.covered;
                if (best < row.min_iou) {
                  row.min_iou = best;
                  row.argmin = base;
                  row.argmin.offset_x = fx;
                  row.argmin.offset_y = fy;
                }
              }
            }
          }
        },
        threads);
    OffsetSummary off;
    off.points = N * M * U * U;
    off.min_iou = 2.0;
    for (const auto& row : orows) {
      off.covered += row.covered;
      if (row.min_iou < off.min_iou) {
        off.min_iou = row.min_iou;
        off.argmin = row.argmin;
      }
    }
    off.fraction_covered = static_cast<double>(off.covered) / static_cast<double>(off.points);
    report.offsets = off;
  }
  return report;
}

Case2Report verify_case2(const AnchorConfig& config, double t, double T, int size_steps,
                         int ar_steps) {
  validate(config);
  if (size_steps < 1 || ar_steps < 1) throw std::invalid_argument("grid needs at least one step");
  const double ratio = size_ratio(config.layers);
  if (std::abs(ratio - 2.0) > 1e-9) {
    throw UnsupportedConfigError("the area argument needs consecutive anchor sizes to double");
  }

  Case2Report report;
  report.t = t;
  report.threshold = T;
  report.size_steps = size_steps;
  report.ar_steps = ar_steps;
  report.min_iou = 2.0;
  const std::vector<AnchorShape> shapes = anchor_shapes(config);
  const double root_t = std::sqrt(t);

  const auto best_in_layer = [&](std::size_t layer, const BoxShape& gt) {
    double best = 0.0;
    for (const auto& s : shapes) {
      if (s.layer == layer) best = std::max(best, concentric_iou(gt, s.shape));
    }
    return best;
  };

  for (std::size_t j = 1; j < config.layers.size(); ++j) {
    const double s_lo = config.layers[j - 1].anchor_size;
    const double s_hi = config.layers[j].anchor_size;
    const double a_lo = s_lo * s_lo;
    const double a_hi = s_hi * s_hi;
    const BoxShape max_lo(s_lo * root_t, s_lo / root_t);
    const BoxShape max_hi(s_hi * root_t, s_hi / root_t);
    for (int i = 1; i <= size_steps; ++i) {
      const double size = s_lo * std::pow(s_hi / s_lo, static_cast<double>(i) / size_steps);
      const double area = size * size;
      for (int m = 0; m < ar_steps; ++m) {
        const double ar = 1.0 + (t - 1.0) * m / ar_steps;
        if (!(ar < t)) continue;
        const BoxShape gt(size * std::sqrt(ar), size / std::sqrt(ar));
        ++report.points;

        const double iou_lower = best_in_layer(j - 1, gt);
        const double iou_upper = best_in_layer(j, gt);
        const double best = std::max(iou_lower, iou_upper);
        report.min_iou = std::min(report.min_iou, best);
        if (!is_matched(best, T)) {
          ++report.counterexamples;
          if (report.witnesses.size() < kMaxWitnesses) {
            report.witnesses.push_back({config.layers[j - 1].name, config.layers[j].name, size, ar,
                                        gt.width(), gt.height(), iou_lower, iou_upper});
          }
        }

        const bool subcase_a = area <= 2.0 * a_lo;
        ++(subcase_a ? report.subcase_a_points : report.subcase_b_points);
        if (!is_matched(subcase_a ? iou_lower : iou_upper, T)) ++report.subcase_designated_failures;

        const bool premise = gt.width() > max_lo.width() && gt.height() > max_lo.height() &&
                             gt.width() < max_hi.width() && gt.height() < max_hi.height();
        if (!premise) {
          ++report.enclosure_premise_violations;
        } else if (std::abs(concentric_iou(gt, max_lo) - a_lo / area) > kIouTolerance ||
                   std::abs(concentric_iou(gt, max_hi) - area / a_hi) > kIouTolerance) {
          ++report.area_identity_mismatches;
        }
      }
    }
  }
  if (report.points == 0) report.min_iou = 1.0;
  report.pass = report.counterexamples == 0 && report.area_identity_mismatches == 0;
  return report;
}

std::optional<double> edge_transform_ar(const BoxShape& gt, double size, double t) {
  const BoxShape anchor = anchor_dims(size, t);
  if (gt.width() > anchor.width() || gt.height() > anchor.height()) return std::nullopt;
  // Anchor width size*sqrt(r) is increasing in r; find where it meets the gt width.
  double lo = 0.0;
  double hi = t;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * t; ++it) {
    const double mid = 0.5 * (lo + hi);
    (size * std::sqrt(mid) <= gt.width() ? lo : hi) = mid;
  }
  if (!(lo > 0.0)) return std::nullopt;
  return lo;
}

}  // namespace anchorfit
