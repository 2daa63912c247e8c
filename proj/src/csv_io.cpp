#include "fosr/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fosr/errors.hpp"

namespace fosr {
namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    std::size_t start = 0;
    while (start < field.size() && field[start] == ' ') ++start;
    field = field.substr(start);
    if (field.size() >= 2 && field.front() == '"' && field.back() == '"') {
      field = field.substr(1, field.size() - 2);
    }
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

bool all_ones(const Eigen::VectorXd& v) { return (v.array() == 1.0).all(); }

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(path.string() + ": empty file (expected a header row)");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  table.header = split_line(line);

  std::vector<std::vector<double>> rows;
  long row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_line(line);
    if (fields.size() != table.header.size()) {
      throw SchemaError(path.string() + ": row " + std::to_string(row_no) + " has " +
                        std::to_string(fields.size()) + " columns, header has " +
                        std::to_string(table.header.size()));
    }
    std::vector<double> row(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const auto& f = fields[j];
      auto res = std::from_chars(f.data(), f.data() + f.size(), row[j]);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size() || !std::isfinite(row[j])) {
        throw SchemaError(path.string() + ": row " + std::to_string(row_no) + ", column '" +
                          table.header[j] + "': not a finite number ('" + f + "')");
      }
    }
    rows.push_back(std::move(row));
  }
  table.values.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(table.header.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) table.values(i, j) = rows[i][j];
  }
  return table;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& values) {
  if (static_cast<Eigen::Index>(header.size()) != values.cols()) {
    throw std::invalid_argument("write_csv: header/column mismatch for " + path.string());
  }
  auto out = open_for_write(path);
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) out << (j ? "," : "") << format_double(values(i, j));
    out << '\n';
  }
}

void write_text_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows) {
  auto out = open_for_write(path);
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
    out << '\n';
  }
}

FunctionalDataset load_dataset(const std::filesystem::path& y_path,
                               const std::optional<std::filesystem::path>& w_path,
                               const std::filesystem::path& x_path, const LoadOptions& options,
                               Standardization* standardization) {
  for (const auto* p : {&y_path, &x_path}) {
    if (!std::filesystem::exists(*p)) throw SchemaError("missing input file: " + p->string());
  }
  if (w_path && !std::filesystem::exists(*w_path)) {
    throw SchemaError("missing input file: " + w_path->string());
  }
  if (!w_path && !options.add_intercept) {
    throw SchemaError("W.csv is required when the intercept is not added automatically");
  }

  FunctionalDataset d;
  const CsvTable y = read_csv(y_path);
  d.Y = y.values;
  d.grid.resize(static_cast<Eigen::Index>(y.header.size()));
  for (std::size_t t = 0; t < y.header.size(); ++t) {
    const auto& h = y.header[t];
    auto res = std::from_chars(h.data(), h.data() + h.size(), d.grid[t]);
    if (res.ec != std::errc() || res.ptr != h.data() + h.size()) {
      throw SchemaError(y_path.string() + ": header entry " + std::to_string(t + 1) + " ('" + h +
                        "') must be the numeric grid value");
    }
  }
  for (Eigen::Index t = 1; t < d.grid.size(); ++t) {
    if (!(d.grid[t] > d.grid[t - 1])) {
      throw SchemaError(y_path.string() + ": grid values in the header must be strictly increasing");
    }
  }

  const CsvTable x = read_csv(x_path);
  if (x.values.rows() != d.Y.rows()) {
    throw SchemaError(x_path.string() + " has " + std::to_string(x.values.rows()) + " rows but " +
                      y_path.string() + " has " + std::to_string(d.Y.rows()));
  }
  d.X = x.values;
  d.cluster_names = x.header;

  Eigen::MatrixXd w_raw(d.Y.rows(), 0);
  std::vector<std::string> w_names;
  if (w_path) {
    const CsvTable w = read_csv(*w_path);
    if (w.values.rows() != d.Y.rows()) {
      throw SchemaError(w_path->string() + " has " + std::to_string(w.values.rows()) +
                        " rows but " + y_path.string() + " has " + std::to_string(d.Y.rows()));
    }
    w_raw = w.values;
    w_names = w.header;
  }
  if (options.add_intercept) {
    d.W.resize(d.Y.rows(), w_raw.cols() + 1);
    d.W.col(0).setOnes();
    d.W.rightCols(w_raw.cols()) = w_raw;
    d.free_names = {"intercept"};
    d.free_names.insert(d.free_names.end(), w_names.begin(), w_names.end());
  } else {
    d.W = w_raw;
    d.free_names = w_names;
  }

  Standardization st;
  auto standardize = [&](Eigen::MatrixXd& m, Eigen::VectorXd& center, Eigen::VectorXd& scale,
                         const std::vector<std::string>& names) {
    center = Eigen::VectorXd::Zero(m.cols());
    scale = Eigen::VectorXd::Ones(m.cols());
    if (!options.standardize) return;
    const double n = static_cast<double>(m.rows());
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (all_ones(m.col(j))) continue;  // intercept
      const double mu = m.col(j).mean();
      const double sd = std::sqrt((m.col(j).array() - mu).square().sum() / std::max(1.0, n - 1.0));
      if (!(sd > 0.0)) throw SchemaError("predictor '" + names[j] + "' is constant and cannot be standardized");
      m.col(j) = (m.col(j).array() - mu) / sd;
      center[j] = mu;
      scale[j] = sd;
    }
  };
  standardize(d.W, st.free_center, st.free_scale, d.free_names);
  standardize(d.X, st.cluster_center, st.cluster_scale, d.cluster_names);
  if (standardization != nullptr) *standardization = st;

  try {
    d.validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
  return d;
}

std::vector<std::string> save_dataset(const FunctionalDataset& data,
                                      const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> grid_header;
  for (Eigen::Index t = 0; t < data.grid.size(); ++t) grid_header.push_back(format_double(data.grid[t]));
  write_csv(dir / "Y.csv", grid_header, data.Y);
  write_csv(dir / "X.csv", data.cluster_names, data.X);

  // the intercept is re-added on ingestion
  const bool lead_intercept = data.W.cols() > 0 && all_ones(data.W.col(0));
  const Eigen::Index skip = lead_intercept ? 1 : 0;
  std::vector<std::string> files{"Y.csv", "X.csv"};
  if (data.W.cols() > skip) {
    std::vector<std::string> w_names(data.free_names.begin() + skip, data.free_names.end());
    write_csv(dir / "W.csv", w_names, data.W.rightCols(data.W.cols() - skip));
    files.push_back("W.csv");
  }
  write_csv(dir / "grid.csv", {"t"}, data.grid);
  files.push_back("grid.csv");
  return files;
}

}  // namespace fosr
