#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace kcheck {

/// The raw sample: covariates (one row per observation), outcome, and an
/// optional binary treatment indicator.
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd Y;
  std::optional<Eigen::VectorXd> T;
  std::vector<std::string> covariate_names;
  std::string outcome_name = "y";
  std::string treatment_name;

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index d() const { return X.cols(); }
};

/// Column roles for CSV ingestion. An empty covariate list means "every column
/// not used as outcome or treatment".
struct CsvSchema {
  std::string y_col;
  std::string t_col;
  std::vector<std::string> x_cols;
};

/// Reads a headered CSV into a Dataset. Data rows are numbered from 1 in
/// error messages, so "(7, age)" is the seventh line after the header.
Dataset ingest_csv(const std::filesystem::path& path, const CsvSchema& schema);

/// Splits a comma-separated list ("a,b,c") into trimmed names.
std::vector<std::string> split_list(const std::string& text);

}  // namespace kcheck
