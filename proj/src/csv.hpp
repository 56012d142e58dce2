#pragma once

#include <string>

#include "model.hpp"

namespace dynsparse {

struct LoadOptions {
  std::string target;           // column name of the response
  std::string date_column;      // optional; kept as strings, not a predictor
  int horizon = 1;              // forecast gap between predictors and target
  bool log_diff_transform = false;  // y = (400/h) ln(P_t / P_{t-1})
  bool standardize = false;         // zero-mean unit-variance predictors
};

// Rectangular numeric CSV with a header row. Predictors are lagged so that
// row t of X holds the values observed `horizon` periods before y_t; with the
// transform on, the raw target column is treated as a price level and turned
// into annualized log growth first. Missing or non-numeric cells raise
// io_error naming the offending row and column.
Dataset load_csv(const std::string& path, const LoadOptions& opts);

// Same parser on in-memory text, for tests and the C API.
Dataset load_csv_text(const std::string& text, const LoadOptions& opts,
                      const std::string& origin = "<memory>");

// 17-significant-digit CSV writer: values survive a round trip through
// load_csv bit-for-bit at 1e-15.
void write_matrix_csv(const std::string& path, const MatrixXd& values,
                      const std::vector<std::string>& col_names,
                      const std::string& index_name = "t", int index_start = 1);

std::string format_double(double v);

}  // namespace dynsparse
