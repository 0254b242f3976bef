#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kcheck/tuning.hpp"

namespace kcheck::cli {

/// Settings shared by every subcommand. Precedence is defaults, then the
/// --config file, then command-line flags.
struct RunConfig {
  std::string command;
  std::string input;
  std::string y_col;  // empty: "y", or "re78" under --preprocess nsw
  std::string t_col;  // empty: none, or "treat" under --preprocess nsw
  std::vector<std::string> x_cols;
  std::string model;  // empty: ols, or both NSW tests under --preprocess nsw
  std::string preprocess;
  std::vector<std::string> statistics{"proj1", "proj2", "rand1", "rand2"};
  long B = 199;
  long J = 3;
  double level = 0.05;
  std::uint64_t seed = 0;
  std::string gamma = "cv";
  std::string lambda = "cv";
  std::string gp_gamma = "median";
  std::string cv_rule = "one-se";
  std::string multipliers = "mammen";
  bool leverage_adjust = false;
  unsigned workers = 1;
  std::string out;

  // simulation
  std::vector<std::string> dgps{"dgp0"};
  long n = 200;
  std::optional<long> d;  // unset: 2 for fig1_*, 20 for starred DGPs, else 10
  long R = 200;
  std::vector<long> J_values{1, 3, 5, 7, 9, 11, 13, 15};
  long resolution = 60;
};

/// Overwrites fields present in `j`; unknown keys are input errors.
void apply_json(RunConfig& cfg, const nlohmann::json& j);
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

/// --out, else $KCHECK_OUTPUT_DIR, else ./kcheck_out.
std::filesystem::path output_dir(const RunConfig& cfg);

/// "cv"/"median" map to nullopt; anything else must parse as a positive number.
/// "min" or "one-se".
CvRule parse_cv_rule(const std::string& text);

std::optional<double> parse_tuning_value(const std::string& text, const char* what);

}  // namespace kcheck::cli
