#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <vector>

namespace anchorfit {

/// One ground-truth row: image_id,cx,cy,width,height (pixels).
struct BoxRecord {
  std::size_t row = 0;  // 0-based index among data rows (header excluded)
  std::string image_id;
  double cx = 0.0;
  double cy = 0.0;
  double width = 0.0;
  double height = 0.0;
};

struct RowError {
  std::size_t line = 0;  // 1-based line number in the input
  std::string message;
};

struct BoxCsv {
  std::vector<BoxRecord> boxes;
  std::vector<RowError> errors;
  std::size_t data_rows = 0;
};

inline constexpr const char* kBoxCsvHeader = "image_id,cx,cy,width,height";

/**
 * Reads the GT box CSV. A leading header line is optional. Rows that do not
 * parse, or whose width/height are not positive, become RowError entries and
 * reading continues. Blank lines are skipped.
 */
BoxCsv read_box_csv(std::istream& in);

}  // namespace anchorfit
