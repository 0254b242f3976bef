#include "kcheck/nsw.hpp"

#include <array>
#include <cmath>
#include <initializer_list>
#include <string>

#include "kcheck/error.hpp"

namespace kcheck {

namespace {

Eigen::Index find_column(const Dataset& ds, std::initializer_list<const char*> aliases) {
  for (const char* alias : aliases) {
    for (std::size_t c = 0; c < ds.covariate_names.size(); ++c) {
      if (ds.covariate_names[c] == alias) return static_cast<Eigen::Index>(c);
    }
  }
  throw InputError(std::string("NSW preprocessing: missing column '") + *aliases.begin() + "'");
}

double log_earnings(double v, const std::string& column, Eigen::Index row) {
  if (v < 0.0) {
    throw InputError("NSW preprocessing: negative earnings at (" + std::to_string(row + 1) + ", " +
                     column + ")");
  }
  return std::log1p(v);
}

}  // namespace

CsvSchema nsw_schema() { return CsvSchema{"re78", "treat", {}}; }

Dataset preprocess_nsw(const Dataset& raw) {
  require(raw.T.has_value(), "NSW preprocessing needs a treatment column");
  const Eigen::Index n = raw.n();
  const std::array<Eigen::Index, 8> src{
      find_column(raw, {"age"}),     find_column(raw, {"educ", "education"}),
      find_column(raw, {"black"}),   find_column(raw, {"hisp", "hispanic"}),
      find_column(raw, {"married"}), find_column(raw, {"nodegree", "nodegr"}),
      find_column(raw, {"re74"}),    find_column(raw, {"re75"})};

  Dataset out;
  out.covariate_names = {"age",      "educ",        "black",      "hisp",
                         "married",  "nodegree",    "log1p_re74", "log1p_re75"};
  out.X.resize(n, 8);
  out.Y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.X(i, 0) = raw.X(i, src[0]) / 10.0;
    out.X(i, 1) = raw.X(i, src[1]) / 10.0;
    for (int c = 2; c < 6; ++c) {
      const double v = raw.X(i, src[c]);
      if (v != 0.0 && v != 1.0) {
        throw InputError("NSW preprocessing: non-binary value at (" + std::to_string(i + 1) + ", " +
                         raw.covariate_names[static_cast<std::size_t>(src[c])] + ")");
      }
      out.X(i, c) = v;
    }
    out.X(i, 6) = log_earnings(raw.X(i, src[6]), "re74", i);
    out.X(i, 7) = log_earnings(raw.X(i, src[7]), "re75", i);
    out.Y(i) = log_earnings(raw.Y(i), raw.outcome_name, i);
  }
  out.T = raw.T;
  out.outcome_name = "log1p_" + raw.outcome_name;
  out.treatment_name = raw.treatment_name;
  return out;
}

NswResult run_nsw_tests(const Dataset& ds, const TestOptions& options) {
  require(ds.T.has_value(), "NSW tests need a treatment column");
  NswResult out{fit_probit(ds.X, *ds.T), {}, {}};
  out.individual = run_tests(ds.X, out.probit, options);

  const FittedModel joint = joint_cate_residuals(ds.X, ds.Y, *ds.T, out.probit);
  out.joint = run_tests(ds.X, joint, options);
  return out;
}

}  // namespace kcheck
