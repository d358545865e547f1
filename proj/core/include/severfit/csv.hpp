#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace severfit {

// Shortest decimal string that parses back to the same double; "inf"/"-inf"/"nan".
std::string format_double(double x);
// Accepts decimal/scientific notation and case-insensitive "inf"/"infinity".
std::optional<double> parse_double(std::string_view s);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

class CsvParseError : public std::runtime_error {
 public:
  CsvParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row
};

// Comma-separated, no quoting. Blank lines and lines starting with '#' are
// skipped; trailing "# ..." comments are stripped. All rows are expected to
// carry as many fields as the first row.
CsvTable read_csv(std::istream& in, bool has_header);

// Loss column from a one-column or named-column file. The header is optional;
// with several columns a header naming `loss` is required.
std::vector<double> read_loss_column(std::istream& in);

}  // namespace severfit
