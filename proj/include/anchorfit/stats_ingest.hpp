#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <span>
#include <vector>

#include "anchorfit/box_csv.hpp"

namespace anchorfit {

/// Percentile ranks reported for AR and size.
inline constexpr int kReportedPercentiles[] = {50, 90, 95, 99, 100};

struct DatasetStats {
  std::size_t count = 0;
  std::size_t rejected = 0;
  std::map<int, double> ar_percentiles;    // AR = max(w,h)/min(w,h)
  std::map<int, double> size_percentiles;  // size = sqrt(w*h)
  double mar_obj = 1.0;                    // 99th AR percentile, ceiled to 0.1
  double size_min = 0.0;
  double size_max = 0.0;
};

struct IngestResult {
  DatasetStats stats;
  std::vector<RowError> errors;
};

/// Nearest-rank percentile of sorted values: element at rank ceil(p/100 * n).
double percentile_nearest_rank(std::span<const double> sorted, double p);

/// Smallest multiple of 0.1 not below x (values within 1e-6 of a tenth stay put).
double ceil_to_tenth(double x);

/// Statistics over already-validated boxes. Throws EmptyDatasetError when empty.
DatasetStats compute_stats(std::span<const BoxRecord> boxes, std::size_t rejected = 0);

/// Reads the GT CSV in one pass and summarizes it. Bad rows are reported and
/// skipped; throws EmptyDatasetError when no valid row remains.
IngestResult ingest(std::istream& in);

}  // namespace anchorfit
