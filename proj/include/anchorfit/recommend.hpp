#pragma once

#include <span>
#include <string>
#include <vector>

#include "anchorfit/anchor_design.hpp"
#include "anchorfit/stats_ingest.hpp"

namespace anchorfit {

struct Recommendation {
  double mar_obj = 1.0;
  double max_anchor_ar = 1.0;
  std::vector<double> suggested_sizes;  // power-of-two ladder covering the size range
  AnchorConfig config;                  // template designed with mar_obj and T
  double guaranteed_size_min = 0.0;     // geometric-mean size range of the template's guarantee
  double guaranteed_size_max = 0.0;
  std::vector<std::string> warnings;
};

/**
 * Turns dataset statistics into a design summary. The suggested ladder runs
 * from 2^floor(log2(2*sqrt(t)*size_min)) to 2^ceil(log2(size_max/sqrt(t))),
 * i.e. the first layer whose octave reaches down to the smallest object and the
 * last one whose octave reaches the largest. Warnings flag objects outside the
 * template's guaranteed range.
 */
Recommendation recommend(const DatasetStats& stats, double T,
                         std::span<const LayerSpec> base = {}, int patch_size = kReferencePatchSize,
                         const DesignOptions& options = {});

}  // namespace anchorfit
