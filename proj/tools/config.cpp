#include "config.hpp"

#include <cstdlib>
#include <fstream>

#include "kcheck/error.hpp"

namespace kcheck::cli {

namespace {

std::string scalar_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  throw InputError("config: expected a string or number, got " + v.dump());
}

template <typename T>
std::vector<T> list_of(const nlohmann::json& v) {
  if (v.is_array()) return v.get<std::vector<T>>();
  return {v.get<T>()};
}

}  // namespace

void apply_json(RunConfig& cfg, const nlohmann::json& j) {
  require(j.is_object(), "config: top level must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "input") cfg.input = v.get<std::string>();
      else if (key == "y_col") cfg.y_col = v.get<std::string>();
      else if (key == "t_col") cfg.t_col = v.get<std::string>();
      else if (key == "x_cols") cfg.x_cols = list_of<std::string>(v);
      else if (key == "model") cfg.model = v.get<std::string>();
      else if (key == "preprocess") cfg.preprocess = v.get<std::string>();
      else if (key == "statistic" || key == "statistics") cfg.statistics = list_of<std::string>(v);
      else if (key == "B") cfg.B = v.get<long>();
      else if (key == "J") cfg.J = v.get<long>();
      else if (key == "level") cfg.level = v.get<double>();
      else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
      else if (key == "gamma") cfg.gamma = scalar_text(v);
      else if (key == "lambda") cfg.lambda = scalar_text(v);
      else if (key == "gp_gamma") cfg.gp_gamma = scalar_text(v);
      else if (key == "cv_rule") cfg.cv_rule = v.get<std::string>();
      else if (key == "multipliers") cfg.multipliers = v.get<std::string>();
      else if (key == "leverage_adjust") cfg.leverage_adjust = v.get<bool>();
      else if (key == "workers") cfg.workers = v.get<unsigned>();
      else if (key == "out") cfg.out = v.get<std::string>();
      else if (key == "dgp" || key == "dgps") cfg.dgps = list_of<std::string>(v);
      else if (key == "n") cfg.n = v.get<long>();
      else if (key == "d") cfg.d = v.get<long>();
      else if (key == "R") cfg.R = v.get<long>();
      else if (key == "J_values") cfg.J_values = list_of<long>(v);
      else if (key == "resolution") cfg.resolution = v.get<long>();
      else throw InputError("config: unknown key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("config: ") + e.what());
  }
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  apply_json(cfg, j);
}

std::filesystem::path output_dir(const RunConfig& cfg) {
  if (!cfg.out.empty()) return cfg.out;
  if (const char* env = std::getenv("KCHECK_OUTPUT_DIR"); env != nullptr && *env != '\0') return env;
  return "kcheck_out";
}

CvRule parse_cv_rule(const std::string& text) {
  if (text == "min") return CvRule::min;
  if (text == "one-se") return CvRule::one_se;
  throw InputError("--cv-rule must be 'min' or 'one-se', got '" + text + "'");
}

std::optional<double> parse_tuning_value(const std::string& text, const char* what) {
  if (text == "cv" || text == "median") return std::nullopt;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !(v > 0.0)) {
    throw InputError(std::string("--") + what + " must be 'cv' or a positive number, got '" + text + "'");
  }
  return v;
}

}  // namespace kcheck::cli
