#include "anchorfit/box_csv.hpp"

#include <charconv>
#include <cmath>
#include <string_view>

namespace anchorfit {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool parse_real(std::string_view field, double& out) {
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size() && std::isfinite(out);
}

bool is_header(const std::vector<std::string_view>& fields) {
  return fields.size() == 5 && fields[0] == "image_id" && fields[1] == "cx" &&
         fields[2] == "cy" && fields[3] == "width" && fields[4] == "height";
}

}  // namespace

BoxCsv read_box_csv(std::istream& in) {
  BoxCsv out;
  std::string line;
  std::size_t line_no = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    const auto fields = split(view);
    if (first_content) {
      first_content = false;
      if (is_header(fields)) continue;
    }
    const std::size_t row = out.data_rows++;
    if (fields.size() != 5) {
      out.errors.push_back({line_no, "expected 5 fields, got " + std::to_string(fields.size())});
      continue;
    }
    BoxRecord rec;
    rec.row = row;
    rec.image_id = std::string(fields[0]);
    if (!parse_real(fields[1], rec.cx) || !parse_real(fields[2], rec.cy) ||
        !parse_real(fields[3], rec.width) || !parse_real(fields[4], rec.height)) {
      out.errors.push_back({line_no, "non-numeric coordinate"});
      continue;
    }
    if (rec.width <= 0.0 || rec.height <= 0.0) {
      out.errors.push_back({line_no, "non-positive box dimension"});
      continue;
    }
    out.boxes.push_back(std::move(rec));
  }
  return out;
}

}  // namespace anchorfit
