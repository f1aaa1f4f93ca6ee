#pragma once

// Minimal RFC-4180 style CSV reading shared by the file readers.

#include <string>
#include <string_view>
#include <vector>

namespace cfr::detail {

struct CsvRow {
  std::size_t line = 0;  // 1-based physical line of the row start
  std::vector<std::string> fields;
};

/// Splits text into rows. Blank lines are skipped. Double-quoted fields may
/// contain separators and doubled quotes.
std::vector<CsvRow> parse_csv(std::string_view text);

std::string csv_escape(std::string_view field);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

double parse_real(const std::string& field, std::size_t line, const char* what);
long long parse_integer(const std::string& field, std::size_t line, const char* what);

}  // namespace cfr::detail
