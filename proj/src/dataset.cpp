#include "kcheck/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string_view>

#include "kcheck/error.hpp"

namespace kcheck {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '"' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name,
                         const std::filesystem::path& path) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw InputError(path.string() + ": missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  for (std::string_view f : split_fields(text)) {
    if (!f.empty()) out.emplace_back(f);
  }
  return out;
}

Dataset ingest_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  require(!schema.y_col.empty(), "CSV schema needs an outcome column");
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line) || trim(line).empty())
    throw InputError(path.string() + ": empty file (row 0, header)");
  std::vector<std::string> header;
  for (std::string_view f : split_fields(line)) header.emplace_back(f);

  const std::size_t y_idx = column_index(header, schema.y_col, path);
  std::optional<std::size_t> t_idx;
  if (!schema.t_col.empty()) t_idx = column_index(header, schema.t_col, path);
  std::vector<std::string> x_names = schema.x_cols;
  if (x_names.empty()) {
    for (const std::string& h : header) {
      if (h != schema.y_col && h != schema.t_col) x_names.push_back(h);
    }
  }
  require(!x_names.empty(), path.string() + ": no covariate columns");
  std::vector<std::size_t> x_idx;
  for (const std::string& name : x_names) x_idx.push_back(column_index(header, name, path));

  std::vector<std::vector<double>> rows;
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row_no;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw InputError(path.string() + ": row " + std::to_string(row_no) + " has " +
                       std::to_string(fields.size()) + " fields, header has " +
                       std::to_string(header.size()));
    }
    std::vector<double> values(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const std::string_view f = fields[c];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v)) {
        throw InputError(path.string() + ": non-numeric or non-finite cell at (" + std::to_string(row_no) +
                         ", " + header[c] + "): '" + std::string(f) + "'");
      }
      values[c] = v;
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw InputError(path.string() + ": empty file (no data rows)");

  const auto n = static_cast<Eigen::Index>(rows.size());
  Dataset ds;
  ds.X.resize(n, static_cast<Eigen::Index>(x_idx.size()));
  ds.Y.resize(n);
  if (t_idx) ds.T = Eigen::VectorXd(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    ds.Y(i) = r[y_idx];
    if (t_idx) (*ds.T)(i) = r[*t_idx];
    for (std::size_t c = 0; c < x_idx.size(); ++c) ds.X(i, static_cast<Eigen::Index>(c)) = r[x_idx[c]];
  }
  ds.covariate_names = std::move(x_names);
  ds.outcome_name = schema.y_col;
  ds.treatment_name = schema.t_col;
  return ds;
}

}  // namespace kcheck
