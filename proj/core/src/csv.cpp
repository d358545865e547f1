#include "severfit/csv.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

namespace severfit {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  bool negative = false;
  std::string_view body = s;
  if (body.front() == '+' || body.front() == '-') {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  if (iequals(body, "inf") || iequals(body, "infinity"))
    return negative ? -HUGE_VAL : HUGE_VAL;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << fields[i];
  }
  out_ << '\n';
}

CsvTable read_csv(std::istream& in, bool has_header) {
  CsvTable table;
  std::string raw;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool header_pending = has_header;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (line_no == 1 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);  // BOM
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto fields = split(line);
    if (width == 0) width = fields.size();
    if (fields.size() != width)
      throw CsvParseError("expected " + std::to_string(width) + " fields, found " +
                              std::to_string(fields.size()),
                          line_no);
    if (header_pending) {
      table.header = std::move(fields);
      header_pending = false;
      continue;
    }
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(line_no);
  }
  return table;
}

std::vector<double> read_loss_column(std::istream& in) {
  // Read once without a header, then decide whether the first row is one.
  auto table = read_csv(in, false);
  if (table.rows.empty()) throw CsvParseError("no data rows", 0);
  std::size_t column = 0;
  std::size_t first = 0;
  const auto& head = table.rows.front();
  const bool numeric_first = std::all_of(head.begin(), head.end(),
                                         [](const std::string& f) { return parse_double(f).has_value(); });
  if (!numeric_first) {
    first = 1;
    if (head.size() == 1) {
      column = 0;
    } else {
      const auto it = std::find_if(head.begin(), head.end(),
                                   [](const std::string& f) { return iequals(f, "loss"); });
      if (it == head.end())
        throw CsvParseError("multi-column file needs a `loss` header", table.line_numbers.front());
      column = static_cast<std::size_t>(it - head.begin());
    }
  } else if (head.size() != 1) {
    // A single headerless row such as "2,4,6" is read as a list of losses.
    if (table.rows.size() != 1)
      throw CsvParseError("multi-column file needs a `loss` header", table.line_numbers.front());
    std::vector<double> out;
    for (const auto& f : head) out.push_back(*parse_double(f));
    return out;
  }
  std::vector<double> out;
  out.reserve(table.rows.size());
  for (std::size_t i = first; i < table.rows.size(); ++i) {
    const auto v = parse_double(table.rows[i][column]);
    if (!v || !std::isfinite(*v))
      throw CsvParseError("malformed number `" + table.rows[i][column] + "`", table.line_numbers[i]);
    out.push_back(*v);
  }
  if (out.empty()) throw CsvParseError("no data rows", table.line_numbers.front());
  return out;
}

}  // namespace severfit
