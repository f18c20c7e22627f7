#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "tspt/data.hpp"

namespace tspt {

/// A fully numeric CSV table: header row required, comma separated, '.'
/// decimal, no missing cells.
struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd cells;
};

/// Throws FILE_NOT_FOUND, PARSE_ERROR (with 1-based line and column in the
/// message), or NON_FINITE_VALUE.
CsvTable read_csv(const std::string& path);

CsvTable parse_csv(const std::string& text, const std::string& origin = "<string>");

/// Selects `response_column` as y; every other column becomes a covariate in
/// file order. Throws MISSING_COLUMN / TOO_FEW_ROWS.
Dataset dataset_from_csv(const CsvTable& table, const std::string& response_column);

/// Selects a single column as a series.
Series series_from_csv(const CsvTable& table, const std::string& column);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& cells);

}  // namespace tspt
