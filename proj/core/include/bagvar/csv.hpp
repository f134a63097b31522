#pragma once

#include "bagvar/dataset.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace bagvar {

/// Which columns of a CSV file play which role. Unset response means the
/// last column; every other column except the weight column is a feature.
struct CsvSchema {
  std::optional<std::string> response;
  std::optional<std::string> weight;
};

/// Header plus numeric cells, row major. Blank or non-numeric cells raise a
/// DataError naming the file line and column.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;
};

CsvTable read_csv_table(const std::string& path);

Dataset load_csv(const std::string& path, const CsvSchema& schema = {});

/// Query points in the feature order of `feature_names`, matched by header
/// name. Extra columns are ignored; a missing one is a DataError.
QueryMatrix load_queries_csv(const std::string& path, const std::vector<std::string>& feature_names);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

void write_csv(std::ostream& out, const Dataset& data);
void write_csv(const std::string& path, const Dataset& data);

}  // namespace bagvar
