#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kcheck/analysis.hpp"
#include "kcheck/bootstrap.hpp"
#include "kcheck/models.hpp"

namespace kcheck {

/// One tested residual system: the model it came from and its test results.
struct ReportSection {
  std::string label;
  ModelTag model = ModelTag::ols;
  Eigen::Index n = 0;
  Eigen::Index d = 0;
  Eigen::Index q = 0;
  Eigen::VectorXd theta_hat;
  TestSuiteResult suite;
};

struct RunReport {
  std::string command;
  std::string input;
  std::uint64_t seed = 0;
  Eigen::Index B = 0;
  Eigen::Index J = 0;
  double level = 0.05;
  MultiplierFamily family = MultiplierFamily::mammen;
  bool leverage_adjust = false;
  std::vector<ReportSection> sections;
};

/// Version string baked in at build time (git describe of the source tree).
const char* build_version();

/// Writes <dir>/report.json (machine-readable, no timestamps, so identical
/// inputs give identical bytes) and <dir>/report.txt. Creates dir if needed.
void emit_report(const RunReport& report, const std::filesystem::path& dir);

/// The JSON text written by emit_report.
std::string report_json(const RunReport& report);
std::string report_text(const RunReport& report);

}  // namespace kcheck
