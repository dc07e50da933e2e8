#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace herald::io {

// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> metadata;  // written as "# " lines
  std::vector<std::string> columns;   // "name[unit]"
  std::vector<std::vector<double>> rows;
  std::vector<std::string> warnings;  // rows flagged unreliable or omitted

  // Throws NumericalError on non-finite cells or a wrong column count.
  void add_row(std::vector<double> row);
  bool flagged() const { return !warnings.empty(); }

  void write(std::ostream& os) const;
  std::string str() const;
};

struct ParsedCsv {
  std::vector<std::string> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

ParsedCsv parse_csv(const std::string& text);

// FNV-1a, 64 bit.
unsigned long long fnv1a64(const std::string& text);

}  // namespace herald::io
