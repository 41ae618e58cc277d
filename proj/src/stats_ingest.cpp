#include "anchorfit/stats_ingest.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "anchorfit/errors.hpp"

namespace anchorfit {

double percentile_nearest_rank(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("percentile of an empty sample");
  if (!(p > 0.0 && p <= 100.0)) throw std::invalid_argument("percentile rank must be in (0, 100]");
  const double rank = std::ceil(p / 100.0 * static_cast<double>(sorted.size()) - 1e-9);
  const auto index = static_cast<std::size_t>(std::max(1.0, rank)) - 1;
  return sorted[std::min(index, sorted.size() - 1)];
}

double ceil_to_tenth(double x) { return std::ceil(x * 10.0 - 1e-6) / 10.0; }

DatasetStats compute_stats(std::span<const BoxRecord> boxes, std::size_t rejected) {
  if (boxes.empty()) throw EmptyDatasetError("no valid boxes in input");
  std::vector<double> ars;
  std::vector<double> sizes;
  ars.reserve(boxes.size());
  sizes.reserve(boxes.size());
  for (const auto& b : boxes) {
    ars.push_back(std::max(b.width, b.height) / std::min(b.width, b.height));
    sizes.push_back(std::sqrt(b.width * b.height));
  }
  std::sort(ars.begin(), ars.end());
  std::sort(sizes.begin(), sizes.end());

  DatasetStats stats;
  stats.count = boxes.size();
  stats.rejected = rejected;
  for (int p : kReportedPercentiles) {
    stats.ar_percentiles[p] = percentile_nearest_rank(ars, p);
    stats.size_percentiles[p] = percentile_nearest_rank(sizes, p);
  }
  stats.mar_obj = std::max(1.0, ceil_to_tenth(stats.ar_percentiles.at(99)));
  stats.size_min = sizes.front();
  stats.size_max = sizes.back();
  return stats;
}

IngestResult ingest(std::istream& in) {
  BoxCsv csv = read_box_csv(in);
  IngestResult result;
  result.stats = compute_stats(csv.boxes, csv.errors.size());
  result.errors = std::move(csv.errors);
  return result;
}

}  // namespace anchorfit
