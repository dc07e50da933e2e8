#include "phonon_herald/csv.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

#include "phonon_herald/errors.hpp"

namespace herald::io {

std::string format_double(double v) {
  if (v == 0.0) return "0";  // folds -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void CsvTable::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) throw NumericalError("csv row has wrong column count");
  for (double v : row)
    if (!std::isfinite(v)) throw NumericalError("non-finite value in csv row");
  rows.push_back(std::move(row));
}

void CsvTable::write(std::ostream& os) const {
  for (const auto& m : metadata) os << "# " << m << '\n';
  for (const auto& w : warnings) os << "# warning: " << w << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  os << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_double(r[i]);
    os << '\n';
  }
}

std::string CsvTable::str() const {
  std::ostringstream os;
  write(os);
  return os.str();
}

ParsedCsv parse_csv(const std::string& text) {
  ParsedCsv out;
  std::istringstream is(text);
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.rfind("# ", 0) == 0) {
      out.metadata.push_back(line.substr(2));
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!header) {
      out.columns = cells;
      header = true;
      continue;
    }
    std::vector<double> row;
    for (const auto& c : cells) {
      double v = 0.0;
      auto res = std::from_chars(c.data(), c.data() + c.size(), v);
      if (res.ec != std::errc()) throw ConfigError("bad csv cell '" + c + "'");
      row.push_back(v);
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

unsigned long long fnv1a64(const std::string& text) {
  unsigned long long h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace herald::io
