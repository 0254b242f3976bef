#include "kcheck/report.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kcheck/error.hpp"

#ifndef KCHECK_GIT_DESCRIBE
#define KCHECK_GIT_DESCRIBE "unknown"
#endif

namespace kcheck {

namespace {

using nlohmann::ordered_json;

ordered_json to_json(const Eigen::Ref<const Eigen::MatrixXd>& M) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json vector_json(const Eigen::VectorXd& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

ordered_json section_json(const ReportSection& s, double level) {
  const TestSuiteResult& r = s.suite;
  ordered_json j;
  j["label"] = s.label;
  j["model"] = std::string(to_string(s.model));
  j["n"] = s.n;
  j["d"] = s.d;
  j["q"] = s.q;
  j["theta_hat"] = vector_json(s.theta_hat);

  ordered_json tuning;
  tuning["cross_validated"] = r.tuning.cross_validated;
  tuning["gamma"] = r.tuning.gamma;
  tuning["lambda"] = r.tuning.lambda;
  if (r.tuning.cross_validated) {
    tuning["folds"] = r.tuning.folds;
    tuning["cv_score"] = r.tuning.cv_score;
    tuning["tuning_rows"] = r.tuning.tuning_rows;
  }
  tuning["applied_rows"] = r.tuning.applied_rows;
  j["tuning"] = std::move(tuning);

  if (r.locations) {
    ordered_json loc;
    loc["J"] = r.locations->J();
    loc["seed"] = r.locations->provenance.seed;
    loc["diagonal_fallback"] = r.locations->provenance.diagonal_fallback;
    loc["mean"] = vector_json(r.locations->provenance.mean);
    loc["covariance"] = to_json(r.locations->provenance.covariance);
    loc["points"] = to_json(r.locations->points);
    j["locations"] = std::move(loc);
  }

  ordered_json tests = ordered_json::array();
  for (const TestReport& t : r.reports) {
    ordered_json e;
    e["statistic"] = std::string(to_string(t.statistic.name));
    e["value"] = t.statistic.value;
    e["p_value"] = t.p_value;
    e["reject"] = t.p_value <= level;
    e["replicates"] = t.replicates;
    e["n"] = t.statistic.scale.n;
    e["gamma"] = t.statistic.scale.gamma;
    e["lambda"] = t.statistic.scale.lambda;
    if (t.statistic.scale.J) e["J"] = *t.statistic.scale.J;
    tests.push_back(std::move(e));
  }
  j["tests"] = std::move(tests);
  return j;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

const char* build_version() { return KCHECK_GIT_DESCRIBE; }

std::string report_json(const RunReport& report) {
  ordered_json j;
  j["version"] = build_version();
  j["command"] = report.command;
  j["input"] = report.input;
  j["seed"] = report.seed;
  j["B"] = report.B;
  j["J"] = report.J;
  j["level"] = report.level;
  j["multipliers"] = report.family == MultiplierFamily::mammen ? "mammen" : "rademacher";
  j["leverage_adjust"] = report.leverage_adjust;
  ordered_json sections = ordered_json::array();
  for (const ReportSection& s : report.sections) sections.push_back(section_json(s, report.level));
  j["sections"] = std::move(sections);
  return j.dump(2) + "\n";
}

std::string report_text(const RunReport& report) {
  std::ostringstream out;
  out.precision(6);
  out << "kcheck " << build_version() << "  command: " << report.command << "\n";
  if (!report.input.empty()) out << "input: " << report.input << "\n";
  out << "seed " << report.seed << ", B = " << report.B << ", level " << report.level << "\n";
  for (const ReportSection& s : report.sections) {
    const TestSuiteResult& r = s.suite;
    out << "\n[" << s.label << "] model " << to_string(s.model) << ", n = " << s.n << ", d = " << s.d
        << ", q = " << s.q << "\n";
    if (r.tuning.gamma > 0.0) {
      out << "  gamma = " << r.tuning.gamma << ", lambda = " << r.tuning.lambda
          << (r.tuning.cross_validated ? " (cross-validated)" : " (fixed)") << "\n";
    }
    if (r.locations) out << "  J = " << r.locations->J() << " random locations\n";
    for (const TestReport& t : r.reports) {
      out << "  " << to_string(t.statistic.name) << ": T = " << t.statistic.value
          << ", p = " << t.p_value << (t.p_value <= report.level ? "  reject" : "") << "\n";
    }
  }
  return out.str();
}

void emit_report(const RunReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / "report.json", report_json(report));
  write_file(dir / "report.txt", report_text(report));
}

}  // namespace kcheck
