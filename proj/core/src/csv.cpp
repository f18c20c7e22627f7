#include "tspt/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace tspt {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  fields.push_back(field);
  return fields;
}

std::string trimmed(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

Eigen::Index column_index(const CsvTable& table, const std::string& name) {
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (table.header[j] == name) return static_cast<Eigen::Index>(j);
  }
  fail(ErrorCode::MissingColumn, "no column named \"" + name + "\" in header");
}

}  // namespace

CsvTable parse_csv(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    fail(ErrorCode::ParseError, origin + ": empty file, header row required");
  }
  CsvTable table;
  for (const std::string& name : split_line(line)) {
    table.header.push_back(trimmed(name));
  }
  const std::size_t columns = table.header.size();

  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_line(line);
    if (fields.size() != columns) {
      fail(ErrorCode::ParseError, origin + ": line " + std::to_string(line_number) + " has " +
                                      std::to_string(fields.size()) + " cells, expected " +
                                      std::to_string(columns));
    }
    for (std::size_t j = 0; j < columns; ++j) {
      const std::string cell = trimmed(fields[j]);
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        fail(ErrorCode::ParseError, origin + ": line " + std::to_string(line_number) +
                                        ", column " + std::to_string(j + 1) + ": cell \"" + cell +
                                        "\" is not numeric");
      }
      if (!std::isfinite(value)) {
        fail(ErrorCode::NonFiniteValue, origin + ": line " + std::to_string(line_number) +
                                            ", column " + std::to_string(j + 1) +
                                            ": non-finite value");
      }
      values.push_back(value);
    }
    ++rows;
  }

  table.cells.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(columns));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < columns; ++j) {
      table.cells(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          values[i * columns + j];
    }
  }
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::FileNotFound, "cannot open \"" + path + "\"");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), path);
}

Dataset dataset_from_csv(const CsvTable& table, const std::string& response_column) {
  const Eigen::Index response = column_index(table, response_column);
  const Eigen::Index columns = table.cells.cols();
  if (columns < 2) {
    fail(ErrorCode::DimensionMismatch, "need at least one covariate column besides the response");
  }
  if (table.cells.rows() == 0) {
    fail(ErrorCode::TooFewRows, "no data rows below the header");
  }
  Eigen::MatrixXd x(table.cells.rows(), columns - 1);
  Eigen::Index out = 0;
  for (Eigen::Index j = 0; j < columns; ++j) {
    if (j == response) continue;
    x.col(out++) = table.cells.col(j);
  }
  return Dataset(table.cells.col(response), std::move(x));
}

Series series_from_csv(const CsvTable& table, const std::string& column) {
  if (table.cells.rows() == 0) {
    fail(ErrorCode::TooFewRows, "no data rows below the header");
  }
  return Series(table.cells.col(column_index(table, column)));
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& cells) {
  if (static_cast<Eigen::Index>(header.size()) != cells.cols()) {
    fail(ErrorCode::DimensionMismatch, "header size does not match column count");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::FileNotFound, "cannot open \"" + path + "\" for writing");
  out.precision(17);
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j > 0) out << ",";
    out << header[j];
  }
  out << "\n";
  for (Eigen::Index i = 0; i < cells.rows(); ++i) {
    for (Eigen::Index j = 0; j < cells.cols(); ++j) {
      if (j > 0) out << ",";
      out << cells(i, j);
    }
    out << "\n";
  }
}

}  // namespace tspt
