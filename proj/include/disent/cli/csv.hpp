#pragma once

// Comma-separated output with a header row, LF line endings and 12
// significant digits. Lines starting with '#' are report lines and are
// skipped by the reader.

#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace disent::cli {

std::string format_number(double value);

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header);

  /// Booleans are written as 0 / 1 by the caller.
  void row(const std::vector<double>& values);
  std::size_t columns() const { return header_.size(); }

 private:
  std::ostream& out_;
  std::vector<std::string> header_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Throws std::runtime_error on ragged rows or unparsable cells.
CsvTable read_csv(std::istream& in);

}  // namespace disent::cli
