#include "anchorfit/anchor_design.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "anchorfit/errors.hpp"
#include "anchorfit/format.hpp"
#include "anchorfit/stats_ingest.hpp"

namespace anchorfit {

namespace {

constexpr double kRelTol = 1e-9;

bool close_rel(double a, double b, double tol = kRelTol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace

double size_ratio(std::span<const LayerSpec> layers) {
  if (layers.size() < 2) return 1.0;
  const double ratio = layers[1].anchor_size / layers[0].anchor_size;
  for (std::size_t i = 1; i < layers.size(); ++i) {
    const double r = layers[i].anchor_size / layers[i - 1].anchor_size;
    if (!close_rel(r, ratio)) {
      throw InvalidConfigError("anchor sizes are not in geometric progression (" +
                               layers[i - 1].name + " -> " + layers[i].name + ")");
    }
  }
  if (ratio <= 1.0) throw InvalidConfigError("anchor sizes must increase across layers");
  return ratio;
}

void validate(const AnchorConfig& config) {
  if (config.layers.empty()) throw InvalidConfigError("config has no layers");
  if (config.patch_size <= 0) throw InvalidConfigError("patch_size must be positive");
  for (const auto& layer : config.layers) {
    if (layer.stride < 1) throw InvalidConfigError("layer " + layer.name + ": stride < 1");
    if (layer.stride > config.patch_size) {
      throw InvalidConfigError("layer " + layer.name + ": stride exceeds patch size");
    }
    if (!(layer.anchor_size > 0.0) || !std::isfinite(layer.anchor_size)) {
      throw InvalidConfigError("layer " + layer.name + ": anchor_size must be positive");
    }
    if (!(layer.anchor_size < layer.receptive_field)) {
      throw InvalidConfigError("layer " + layer.name +
                               ": anchor_size must be smaller than the receptive field");
    }
    if (layer.aspect_ratios.empty()) {
      throw InvalidConfigError("layer " + layer.name + ": empty aspect ratio set");
    }
    for (double ar : layer.aspect_ratios) {
      if (!(ar > 0.0) || !std::isfinite(ar)) {
        throw InvalidConfigError("layer " + layer.name + ": aspect ratios must be positive");
      }
    }
  }
  size_ratio(config.layers);
  if (config.double_set) {
    if (config.second_set_sizes.size() != config.layers.size()) {
      throw InvalidConfigError("double_set needs one second-set size per layer");
    }
    for (double s : config.second_set_sizes) {
      if (!(s > 0.0) || !std::isfinite(s)) {
        throw InvalidConfigError("second-set sizes must be positive");
      }
    }
  } else if (!config.second_set_sizes.empty()) {
    throw InvalidConfigError("second_set_sizes given without double_set");
  }
}

ArBounds max_anchor_ar_bounds(double k, double T) {
  if (!(T > 0.0 && T < 1.0)) {
    throw std::invalid_argument("IoU threshold must lie in (0, 1); T = 1 makes T/(2-2T) singular");
  }
  if (!(k >= 1.0) || !std::isfinite(k)) {
    throw std::invalid_argument("object AR bound k must be >= 1");
  }
  const double q = 2.0 / (1.0 + 1.0 / T);
  return {k * q * q, T * k / (2.0 - 2.0 * T), T * k};
}

double max_anchor_ar_unclamped(double k, double T) {
  const ArBounds b = max_anchor_ar_bounds(k, T);
  return std::max({b.discriminant, b.lower_endpoint, b.upper_endpoint});
}

double max_anchor_ar(double k, double T) { return std::max(1.0, max_anchor_ar_unclamped(k, T)); }

std::vector<double> aspect_ratio_set(double max_ar, bool two_ratios) {
  if (!(max_ar > 0.0)) throw std::invalid_argument("max AR must be positive");
  std::vector<double> ratios;
  if (max_ar > 1.0 + kRelTol) {
    if (two_ratios) {
      const double mid = std::round(2.0 * std::sqrt(max_ar)) / 2.0;
      if (mid > 1.0 + kRelTol && mid < max_ar - kRelTol) ratios.push_back(mid);
    }
    ratios.push_back(max_ar);
  }
  std::vector<double> out{1.0};
  out.insert(out.end(), ratios.begin(), ratios.end());
  for (double r : ratios) out.push_back(1.0 / r);
  return out;
}

std::vector<double> second_set_sizes(std::span<const LayerSpec> layers, int patch_size) {
  std::vector<double> out;
  out.reserve(layers.size());
  for (std::size_t i = 0; i + 1 < layers.size(); ++i) {
    out.push_back(std::sqrt(layers[i].anchor_size * layers[i + 1].anchor_size));
  }
  if (!layers.empty()) out.push_back(static_cast<double>(patch_size));
  return out;
}

AnchorConfig design_config(double mar_obj, double T, std::span<const LayerSpec> base,
                           int patch_size, const DesignOptions& options) {
  if (base.empty()) throw InvalidConfigError("layer template is empty");
  size_ratio(base);
  const double t = max_anchor_ar(mar_obj, T);

  AnchorConfig config;
  config.patch_size = patch_size;
  config.double_set = options.double_set;
  const std::size_t n = base.size();
  for (std::size_t i = 0; i < n; ++i) {
    LayerSpec layer = base[i];
    if (n > 1 && i == 0) {
      layer.aspect_ratios = aspect_ratio_set(std::min(t, options.first_layer_max_ar), false);
    } else if (n > 1 && i == n - 1) {
      layer.aspect_ratios = aspect_ratio_set(std::min(t, options.last_layer_max_ar), false);
    } else {
      layer.aspect_ratios = aspect_ratio_set(t, true);
    }
    config.layers.push_back(std::move(layer));
  }
  if (options.double_set) config.second_set_sizes = second_set_sizes(config.layers, patch_size);
  validate(config);
  return config;
}

AnchorConfig design_config(const DatasetStats& stats, double T, std::span<const LayerSpec> base,
                           int patch_size, const DesignOptions& options) {
  return design_config(stats.mar_obj, T, base, patch_size, options);
}

std::vector<LayerSpec> reference_template() {
  return {
      {"conv3_3", 4, 16.0, {1.0}, 48},
      {"conv4_3", 8, 32.0, {1.0}, 108},
      {"conv5_3", 16, 64.0, {1.0}, 228},
      {"conv_fc_7", 32, 128.0, {1.0}, 340},
      {"conv6_2", 64, 256.0, {1.0}, 468},
  };
}

double config_max_ar(const AnchorConfig& config) {
  double t = 0.0;
  for (const auto& layer : config.layers) {
    for (double ar : layer.aspect_ratios) t = std::max(t, ar);
  }
  return t;
}

std::size_t shapes_per_center(const AnchorConfig& config, std::size_t layer) {
  return config.layers.at(layer).aspect_ratios.size() + (config.double_set ? 1 : 0);
}

std::vector<AnchorShape> anchor_shapes(const AnchorConfig& config) {
  std::vector<AnchorShape> out;
  for (std::size_t l = 0; l < config.layers.size(); ++l) {
    const LayerSpec& layer = config.layers[l];
    std::size_t slot = 0;
    for (double ar : layer.aspect_ratios) {
      out.push_back({l, AnchorSet::kFirst, slot++, ar, anchor_dims(layer.anchor_size, ar)});
    }
    if (config.double_set) {
      out.push_back({l, AnchorSet::kSecond, slot, 1.0,
                     anchor_dims(config.second_set_sizes.at(l), 1.0)});
    }
  }
  return out;
}

int centers_per_axis(int patch_size, int stride) {
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
  return patch_size / stride;
}

std::vector<TiledAnchor> tile_anchors(const AnchorConfig& config) {
  validate(config);
  const std::vector<AnchorShape> shapes = anchor_shapes(config);
  std::vector<TiledAnchor> out;
  for (std::size_t l = 0; l < config.layers.size(); ++l) {
    const int stride = config.layers[l].stride;
    const int n = centers_per_axis(config.patch_size, stride);
    std::vector<const AnchorShape*> layer_shapes;
    for (const auto& s : shapes) {
      if (s.layer == l) layer_shapes.push_back(&s);
    }
    std::size_t index = 0;
    for (int row = 0; row < n; ++row) {
      const double cy = (row + 0.5) * stride;
      for (int col = 0; col < n; ++col) {
        const double cx = (col + 0.5) * stride;
        for (const AnchorShape* s : layer_shapes) {
          out.push_back({PlacedBox{cx, cy, s->shape}, l, index++, s->slot, s->set, s->ar, row, col});
        }
      }
    }
  }
  return out;
}

std::pair<int, int> dominant_cell(const AnchorConfig& config, std::size_t layer, double x,
                                  double y) {
  const int stride = config.layers.at(layer).stride;
  const int n = centers_per_axis(config.patch_size, stride);
  const auto cell = [&](double v) {
    const double c = std::floor(v / stride);
    return static_cast<int>(std::clamp(c, 0.0, static_cast<double>(n - 1)));
  };
  return {cell(y), cell(x)};
}

std::size_t tiled_index(const AnchorConfig& config, std::size_t layer, int row, int col,
                        std::size_t slot) {
  const int n = centers_per_axis(config.patch_size, config.layers.at(layer).stride);
  const std::size_t per_center = shapes_per_center(config, layer);
  return (static_cast<std::size_t>(row) * n + col) * per_center + slot;
}

std::pair<double, double> guaranteed_height_range(const AnchorConfig& config, double t) {
  const double root = std::sqrt(t);
  std::size_t first = 0;
  std::size_t last = 0;
  bool any = false;
  for (std::size_t j = 1; j < config.layers.size(); ++j) {
    const auto& ars = config.layers[j].aspect_ratios;
    const bool carries_t =
        std::any_of(ars.begin(), ars.end(), [&](double ar) { return close_rel(ar, t, 1e-9); });
    if (!carries_t) continue;
    if (!any) first = j;
    last = j;
    any = true;
  }
  if (!any) return {0.0, 0.0};
  return {config.layers[first - 1].anchor_size / root, config.layers[last].anchor_size / root};
}

std::vector<ScatterPoint> scatter_data(const AnchorConfig& config, std::span<const BoxShape> gt) {
  std::vector<double> series_ars;
  for (const auto& layer : config.layers) {
    for (double ar : layer.aspect_ratios) {
      const bool seen = std::any_of(series_ars.begin(), series_ars.end(),
                                    [&](double s) { return close_rel(s, ar); });
      if (!seen) series_ars.push_back(ar);
    }
  }

  std::vector<ScatterPoint> out;
  for (double ar : series_ars) {
    const std::string label = "ar=" + format_real(ar);
    for (const auto& layer : config.layers) {
      for (double a : layer.aspect_ratios) {
        if (!close_rel(a, ar)) continue;
        const BoxShape s = anchor_dims(layer.anchor_size, a);
        out.push_back({label, s.width(), s.height()});
      }
    }
  }
  if (config.double_set) {
    for (double size : config.second_set_sizes) out.push_back({"second_set", size, size});
  }
  for (const auto& box : gt) out.push_back({"gt", box.width(), box.height()});
  return out;
}

}  // namespace anchorfit
