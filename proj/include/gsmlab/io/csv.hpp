#pragma once

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gsmlab::io {

// Shortest round-trip decimal form, independent of the locale.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(&out), columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) *out_ << (i ? "," : "") << header[i];
    *out_ << '\n';
  }

  CsvWriter& operator<<(double v) { return cell(format_double(v)); }
  CsvWriter& operator<<(int v) { return cell(std::to_string(v)); }
  CsvWriter& operator<<(long v) { return cell(std::to_string(v)); }
  CsvWriter& operator<<(std::size_t v) { return cell(std::to_string(v)); }
  CsvWriter& operator<<(std::string_view v) { return cell(std::string(v)); }
  CsvWriter& operator<<(const char* v) { return cell(v); }

  // Completes the row; throws if the cell count does not match the header.
  void end_row();

 private:
  CsvWriter& cell(const std::string& text);
  std::ostream* out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

inline CsvWriter& CsvWriter::cell(const std::string& text) {
  *out_ << (filled_ ? "," : "") << text;
  ++filled_;
  return *this;
}

inline void CsvWriter::end_row() {
  if (filled_ != columns_) throw std::logic_error("CSV row has " + std::to_string(filled_) + " cells, header has " +
                                                  std::to_string(columns_));
  *out_ << '\n';
  filled_ = 0;
}

}  // namespace gsmlab::io
