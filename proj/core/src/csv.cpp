#include "bagvar/csv.hpp"

#include "bagvar/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace bagvar {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        cell += '"';
        ++k;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(trim(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  cells.push_back(trim(cell));
  return cells;
}

std::string where(const std::string& path, std::size_t line, std::size_t col, const std::string& name) {
  return path + ": row " + std::to_string(line) + " column " + std::to_string(col + 1) + " (" + name + ")";
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw DataError("csv: no column named '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_line(line);
    if (!have_header) {
      table.header = std::move(cells);
      for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (table.header[c].empty()) throw DataError(path + ": empty header name in column " + std::to_string(c + 1));
      }
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw DataError(path + ": row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                      " cells, header has " + std::to_string(table.header.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string& cell = cells[c];
      if (cell.empty()) throw DataError("missing value at " + where(path, line_no, c, table.header[c]));
      const char* begin = cell.data();
      const char* end = begin + cell.size();
      if (*begin == '+') ++begin;
      const auto [ptr, ec] = std::from_chars(begin, end, row[c]);
      if (ec != std::errc() || ptr != end) {
        throw DataError("non-numeric value '" + cell + "' at " + where(path, line_no, c, table.header[c]));
      }
      if (!std::isfinite(row[c])) {
        throw DataError("non-finite value '" + cell + "' at " + where(path, line_no, c, table.header[c]));
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (!have_header) throw DataError(path + ": empty file");
  if (table.rows.empty()) throw DataError(path + ": no data rows");
  return table;
}

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
  const CsvTable table = read_csv_table(path);
  const std::size_t cols = table.header.size();
  const std::size_t response = schema.response ? table.column(*schema.response) : cols - 1;
  std::optional<std::size_t> weight;
  if (schema.weight) weight = table.column(*schema.weight);
  if (weight && *weight == response) throw DataError("csv: response and weight columns coincide");

  std::vector<std::size_t> features;
  for (std::size_t c = 0; c < cols; ++c) {
    if (c != response && (!weight || c != *weight)) features.push_back(c);
  }
  if (features.empty()) throw DataError(path + ": no feature columns");

  const auto n = static_cast<Eigen::Index>(table.rows.size());
  Matrix x(n, static_cast<Eigen::Index>(features.size()));
  Vector y(n);
  Vector w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    for (std::size_t j = 0; j < features.size(); ++j) x(i, static_cast<Eigen::Index>(j)) = row[features[j]];
    y(i) = row[response];
    if (weight) w(i) = row[*weight];
  }
  Dataset data(std::move(x), std::move(y), weight ? std::optional<Vector>(std::move(w)) : std::nullopt);
  std::vector<std::string> names;
  for (std::size_t c : features) names.push_back(table.header[c]);
  data.set_names(std::move(names), table.header[response]);
  return data;
}

QueryMatrix load_queries_csv(const std::string& path, const std::vector<std::string>& feature_names) {
  const CsvTable table = read_csv_table(path);
  std::vector<std::size_t> cols;
  for (const auto& name : feature_names) cols.push_back(table.column(name));
  QueryMatrix q(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = table.rows[i][cols[j]];
    }
  }
  return q;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw DataError("cannot format number");
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const Dataset& data) {
  for (const auto& name : data.feature_names()) out << name << ',';
  out << data.response_name();
  if (data.has_weights()) out << ",weight";
  out << '\n';
  for (std::size_t i = 0; i < data.rows(); ++i) {
    for (std::size_t j = 0; j < data.features(); ++j) out << format_double(data.x(i, j)) << ',';
    out << format_double(data.y(i));
    if (data.has_weights()) out << ',' << format_double((*data.weights())(static_cast<Eigen::Index>(i)));
    out << '\n';
  }
}

void write_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  write_csv(out, data);
  if (!out) throw DataError("write failed: " + path);
}

}  // namespace bagvar
