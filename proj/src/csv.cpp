#include "csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace dynsparse {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // trim surrounding whitespace
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell, const std::string& origin, int row,
                  const std::string& col) {
  if (cell.empty())
    throw io_error(origin + ": missing value at row " + std::to_string(row) +
                   ", column '" + col + "'");
  try {
    size_t pos = 0;
    const double v = std::stod(cell, &pos);
    if (pos != cell.size()) throw std::invalid_argument("trailing characters");
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite");
    return v;
  } catch (const std::exception&) {
    throw io_error(origin + ": cannot parse '" + cell + "' at row " +
                   std::to_string(row) + ", column '" + col + "'");
  }
}

}  // namespace

Dataset load_csv_text(const std::string& text, const LoadOptions& opts,
                      const std::string& origin) {
  if (opts.horizon < 1) throw std::invalid_argument("load_csv: horizon must be >= 1");
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line)) throw io_error(origin + ": empty file");
  const std::vector<std::string> header = split_line(line);
  if (header.empty()) throw io_error(origin + ": empty header row");

  int target_col = -1, date_col = -1;
  for (size_t c = 0; c < header.size(); ++c) {
    if (header[c] == opts.target) target_col = static_cast<int>(c);
    if (!opts.date_column.empty() && header[c] == opts.date_column)
      date_col = static_cast<int>(c);
  }
  if (target_col < 0)
    throw io_error(origin + ": target column '" + opts.target + "' not found");
  if (!opts.date_column.empty() && date_col < 0)
    throw io_error(origin + ": date column '" + opts.date_column + "' not found");

  std::vector<std::vector<double>> rows;
  std::vector<std::string> dates;
  int row_no = 1;
  while (std::getline(ss, line)) {
    ++row_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size())
      throw io_error(origin + ": row " + std::to_string(row_no) + " has " +
                     std::to_string(cells.size()) + " cells, expected " +
                     std::to_string(header.size()));
    std::vector<double> vals(cells.size(), 0.0);
    for (size_t c = 0; c < cells.size(); ++c) {
      if (static_cast<int>(c) == date_col) continue;
      vals[c] = parse_cell(cells[c], origin, row_no, header[c]);
    }
    if (date_col >= 0) dates.push_back(cells[date_col]);
    rows.push_back(std::move(vals));
  }
  const int raw_n = static_cast<int>(rows.size());
  const int h = opts.horizon;

  // Target series: either the raw column, or annualized log growth of a
  // price level (only defined from the second raw row on).
  std::vector<double> target(raw_n, 0.0);
  int first_target = 0;
  if (opts.log_diff_transform) {
    for (int r = 1; r < raw_n; ++r) {
      const double p0 = rows[r - 1][target_col];
      const double p1 = rows[r][target_col];
      if (!(p0 > 0.0 && p1 > 0.0))
        throw io_error(origin + ": log transform needs positive levels (row " +
                       std::to_string(r + 2) + ")");
      target[r] = (400.0 / h) * std::log(p1 / p0);
    }
    first_target = 1;
  } else {
    for (int r = 0; r < raw_n; ++r) target[r] = rows[r][target_col];
  }

  // Pair y at raw row r with predictors at raw row r - h.
  const int first = std::max(first_target, h);
  const int n = raw_n - first;
  if (n < 1)
    throw io_error(origin + ": not enough rows after lag alignment (need > " +
                   std::to_string(first) + ")");

  Dataset data;
  const int p = static_cast<int>(header.size()) - 1 - (date_col >= 0 ? 1 : 0);
  if (p < 1) throw io_error(origin + ": no predictor columns besides the target");
  data.y.resize(n);
  data.X.resize(n, p);
  data.names.reserve(p);
  for (size_t c = 0; c < header.size(); ++c)
    if (static_cast<int>(c) != target_col && static_cast<int>(c) != date_col)
      data.names.push_back(header[c]);
  for (int i = 0; i < n; ++i) {
    const int r = first + i;
    data.y(i) = target[r];
    if (date_col >= 0) data.timestamps.push_back(dates[r]);
    int jc = 0;
    for (size_t c = 0; c < header.size(); ++c) {
      if (static_cast<int>(c) == target_col || static_cast<int>(c) == date_col) continue;
      data.X(i, jc++) = rows[r - h][c];
    }
  }

  if (opts.standardize) {
    for (int j = 0; j < p; ++j) {
      const double mean = data.X.col(j).mean();
      double sd = std::sqrt((data.X.col(j).array() - mean).square().sum() /
                            std::max(1, n - 1));
      if (sd < 1e-12) sd = 1.0;
      data.X.col(j) = (data.X.col(j).array() - mean) / sd;
    }
  }
  return data;
}

Dataset load_csv(const std::string& path, const LoadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_csv_text(buffer.str(), opts, path);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_matrix_csv(const std::string& path, const MatrixXd& values,
                      const std::vector<std::string>& col_names,
                      const std::string& index_name, int index_start) {
  if (static_cast<int>(col_names.size()) != values.cols())
    throw std::invalid_argument("write_matrix_csv: header size mismatch");
  std::ofstream out(path);
  if (!out) throw io_error("cannot write " + path);
  out << index_name;
  for (const auto& name : col_names) out << ',' << name;
  out << '\n';
  for (int i = 0; i < values.rows(); ++i) {
    out << (index_start + i);
    for (int j = 0; j < values.cols(); ++j) out << ',' << format_double(values(i, j));
    out << '\n';
  }
  if (!out) throw io_error("failed while writing " + path);
}

}  // namespace dynsparse
