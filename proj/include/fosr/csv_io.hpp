#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fosr/model.hpp"

namespace fosr {

/// Numeric table with a header row.
struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd values;
};

/// Shortest text that round-trips the double exactly.
std::string format_double(double v);

/// Reads a comma-separated numeric table. Throws SchemaError naming the path,
/// row and column on malformed input.
CsvTable read_csv(const std::filesystem::path& path);

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& values);

/// Mixed text/number table, written verbatim.
void write_text_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows);

/// Column centering/scaling applied on ingestion (the intercept is left untouched).
struct Standardization {
  Eigen::VectorXd free_center, free_scale;
  Eigen::VectorXd cluster_center, cluster_scale;
};

struct LoadOptions {
  bool add_intercept = true;
  bool standardize = true;
};

/// Loads Y.csv (header = grid values), X.csv and an optional W.csv
/// (header = predictor names). The intercept is prepended to W unless
/// `add_intercept` is false, in which case W.csv is required.
FunctionalDataset load_dataset(const std::filesystem::path& y_path,
                               const std::optional<std::filesystem::path>& w_path,
                               const std::filesystem::path& x_path, const LoadOptions& options,
                               Standardization* standardization = nullptr);

/// Writes Y.csv, X.csv, grid.csv and W.csv (without the leading intercept column;
/// omitted when the intercept is the only free effect).
std::vector<std::string> save_dataset(const FunctionalDataset& data,
                                      const std::filesystem::path& dir);

}  // namespace fosr
