#include "anchorfit/recommend.hpp"

#include <cmath>

#include "anchorfit/format.hpp"

namespace anchorfit {

Recommendation recommend(const DatasetStats& stats, double T, std::span<const LayerSpec> base,
                         int patch_size, const DesignOptions& options) {
  const std::vector<LayerSpec> reference = reference_template();
  if (base.empty()) base = reference;

  Recommendation rec;
  rec.mar_obj = stats.mar_obj;
  rec.max_anchor_ar = max_anchor_ar(stats.mar_obj, T);
  const double root_t = std::sqrt(rec.max_anchor_ar);

  const double first = std::exp2(std::floor(std::log2(2.0 * root_t * stats.size_min)));
  const double last =
      std::max(first, std::exp2(std::ceil(std::log2(stats.size_max / root_t))));
  for (double s = first; s <= last * (1.0 + 1e-12); s *= 2.0) rec.suggested_sizes.push_back(s);

  rec.config = design_config(stats.mar_obj, T, base, patch_size, options);
  const auto [h_lo, h_hi] = guaranteed_height_range(rec.config, rec.max_anchor_ar);
  if (h_hi <= 0.0) {
    rec.warnings.push_back("no layer of the template carries the maximum AR " +
                           format_real(rec.max_anchor_ar) + " with a lower neighbour");
    return rec;
  }
  const double root_k = std::sqrt(stats.mar_obj);
  rec.guaranteed_size_min = h_lo * root_k;
  rec.guaranteed_size_max = h_hi * root_k;
  if (stats.size_min <= rec.guaranteed_size_min) {
    rec.warnings.push_back("objects of size " + format_real(stats.size_min) +
                           " fall below the guaranteed range (" +
                           format_real(rec.guaranteed_size_min) + ", " +
                           format_real(rec.guaranteed_size_max) + "]; smallest layer " +
                           rec.config.layers.front().name + " (" +
                           format_real(rec.config.layers.front().anchor_size) + ")");
  }
  if (stats.size_max > rec.guaranteed_size_max) {
    rec.warnings.push_back("objects of size " + format_real(stats.size_max) +
                           " exceed the guaranteed range (" +
                           format_real(rec.guaranteed_size_min) + ", " +
                           format_real(rec.guaranteed_size_max) + "]; largest layer " +
                           rec.config.layers.back().name + " (" +
                           format_real(rec.config.layers.back().anchor_size) + ")");
  }
  return rec;
}

}  // namespace anchorfit
