#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "kcheck/error.hpp"
#include "kcheck/simulate.hpp"

using namespace kcheck;

TEST_CASE("dgp ids and dimension pairing") {
  for (const char* name : {"dgp0", "dgp1", "dgp2", "dgp3", "dgp4", "dgp5", "dgp6", "dgp5_star", "dgp6_star",
                           "fig1_dgp0", "fig1_dgp1", "fig1_dgp2"})
    CHECK(to_string(parse_dgp_id(name)) == name);
  CHECK_THROWS_AS(parse_dgp_id("dgp7"), InputError);
  CHECK_THROWS_AS((DgpSpec{DgpId::dgp5, 100, 20, 0}.validate()), InputError);
  CHECK_THROWS_AS((DgpSpec{DgpId::dgp6_star, 100, 10, 0}.validate()), InputError);
  CHECK_THROWS_AS((DgpSpec{DgpId::fig1_dgp1, 100, 3, 0}.validate()), InputError);
  CHECK_NOTHROW((DgpSpec{DgpId::dgp3, 100, 20, 0}.validate()));
  CHECK_THROWS_AS(generate(DgpSpec{DgpId::dgp5, 100, 4, 0}), InputError);
}

TEST_CASE("dgp0 without noise is the linear mean function") {
  const SimulatedSample s = generate(DgpSpec{DgpId::dgp0, 50, 10, 3}, 0.0);
  const Eigen::VectorXd mean = 1.0 + (0.5 * s.data.X.rowwise().sum()).array();
  CHECK((s.data.Y - mean).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(s.true_residual.cwiseAbs().maxCoeff() == 0.0);
  const SimulatedSample noisy = generate(DgpSpec{DgpId::dgp0, 50, 10, 3});
  CHECK(noisy.data.X == s.data.X);
  CHECK((noisy.data.Y - mean - noisy.true_residual).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("generate is deterministic in the seed") {
  const DgpSpec spec{DgpId::dgp3, 40, 10, 11};
  CHECK(generate(spec).data.Y == generate(spec).data.Y);
  CHECK(generate(DgpSpec{DgpId::dgp3, 40, 10, 12}).data.Y != generate(spec).data.Y);
}

TEST_CASE("dgp3 and fig1 mean functions") {
  const SimulatedSample s = generate(DgpSpec{DgpId::dgp3, 30, 10, 1}, 0.0);
  const Eigen::ArrayXd t = 0.5 * s.data.X.rowwise().sum().array();
  CHECK((s.data.Y.array() - (1.0 + t + 0.5 * t * t)).abs().maxCoeff() <= 1e-12);
  const SimulatedSample f = generate(DgpSpec{DgpId::fig1_dgp1, 30, 2, 1}, 0.0);
  const Eigen::ArrayXd u = f.data.X.rowwise().sum().array();
  CHECK((f.data.Y.array() - (u + 4.5 * u * u)).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("dgp5 covariate blocks") {
  const SimulatedSample s = generate(DgpSpec{DgpId::dgp5, 100000, 10, 7});
  const Eigen::MatrixXd& X = s.data.X;
  for (int l = 1; l <= 5; ++l) {
    const double upper = 1.0 + 0.1 * (l - 1);
    CHECK(X.col(l - 1).minCoeff() >= 0.0);
    CHECK(X.col(l - 1).maxCoeff() <= upper);
    CHECK(X.col(l - 1).maxCoeff() >= 0.99 * upper);
  }
  for (int l = 6; l <= 10; ++l) {
    const Eigen::ArrayXd c = X.col(l - 1).array();
    const double sd = std::sqrt((c - c.mean()).square().sum() / (c.size() - 1));
    const double want = 1.0 + 0.1 * (l - 5);
    CHECK(std::abs(sd - want) <= 0.02 * want);
  }
  const SimulatedSample six = generate(DgpSpec{DgpId::dgp6, 20000, 10, 7});
  for (int l = 1; l <= 5; ++l) {
    CHECK(six.data.X.col(l - 1).maxCoeff() <= l);
    CHECK(six.data.X.col(l - 1).maxCoeff() >= 0.99 * l);
  }
}

TEST_CASE("dgp6 drift shrinks like n^(-1/2)") {
  double scaled[3];
  int k = 0;
  for (Eigen::Index n : {100, 400, 1600}) {
    const SimulatedSample s = generate(DgpSpec{DgpId::dgp6, n, 10, 5}, 0.0);
    scaled[k++] = s.true_residual.mean() * std::sqrt(static_cast<double>(n));
  }
  CHECK(std::abs(scaled[0] / scaled[2] - 1.0) <= 0.1);
  CHECK(std::abs(scaled[1] / scaled[2] - 1.0) <= 0.1);
}

TEST_CASE("experiment spec validation") {
  ExperimentSpec spec;
  CHECK_NOTHROW(spec.validate());
  spec.R = 0;
  CHECK_THROWS_AS(spec.validate(), InputError);
  spec = ExperimentSpec{};
  spec.level = 1.0;
  CHECK_THROWS_AS(spec.validate(), InputError);
  spec = ExperimentSpec{};
  spec.B = 0;
  CHECK_THROWS_AS(spec.validate(), InputError);
}

TEST_CASE("smoke cell and determinism across workers") {
  ExperimentSpec spec;
  spec.dgp = DgpSpec{DgpId::dgp1, 60, 10, 0};
  spec.statistics = {StatName::proj1, StatName::rand2, StatName::gp, StatName::icm};
  spec.R = 1;
  spec.B = 1;
  const CellResult one = run_cell(spec);
  REQUIRE(one.p_values.size() == 4);
  for (const auto& p : one.p_values) {
    REQUIRE(p.size() == 1);
    CHECK((p(0) == 0.5 || p(0) == 1.0));
    const double rate = one.rejection_rate(StatName::proj1, 0.6);
    CHECK((rate == 0.0 || rate == 1.0));
  }

  spec.R = 6;
  spec.B = 19;
  spec.seed = 3;
  const CellResult a = run_cell(spec);
  spec.workers = 3;
  const CellResult b = run_cell(spec);
  for (std::size_t s = 0; s < a.p_values.size(); ++s) CHECK(a.p_values[s] == b.p_values[s]);
}

TEST_CASE("rejection rates are nested in the level") {
  ExperimentSpec spec;
  spec.dgp = DgpSpec{DgpId::dgp0, 60, 3, 0};
  spec.R = 20;
  spec.B = 39;
  spec.gamma = 0.3;
  spec.lambda = 0.1;
  const CellResult c = run_cell(spec);
  for (StatName s : spec.statistics) {
    CHECK(c.rejection_rate(s, 0.01) <= c.rejection_rate(s, 0.05));
    CHECK(c.rejection_rate(s, 0.05) <= c.rejection_rate(s, 0.10));
    const double p = c.rejection_rate(s, 0.10);
    CHECK(c.mc_se(s, 0.10) == doctest::Approx(std::sqrt(p * (1 - p) / 20)));
  }
  CHECK_THROWS_AS(c.rejection_rate(StatName::gp), InputError);
}

TEST_CASE("power vs J table and CSV exports") {
  ExperimentSpec base;
  base.dgp = DgpSpec{DgpId::dgp2, 50, 10, 0};
  base.R = 2;
  base.B = 9;
  const auto rows = run_power_vs_J(base, {5, 1, 3, 3});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].J == 1);
  CHECK(rows[1].J == 3);
  CHECK(rows[2].J == 5);
  CHECK(rows[0].R == 2);
  CHECK(run_power_vs_J(base, {2}).size() == 1);
  CHECK_THROWS_AS(run_power_vs_J(base, {0}), InputError);
  CHECK_THROWS_AS(run_power_vs_J(base, {16}), InputError);

  const auto dir = std::filesystem::temp_directory_path() / "kcheck_test_sim";
  std::filesystem::create_directories(dir);
  write_power_csv(rows, dir / "power.csv");
  std::ifstream pin(dir / "power.csv");
  std::string line;
  std::getline(pin, line);
  CHECK(line == "J,rand1,rand1_se,rand2,rand2_se,R");
  int n = 0;
  while (std::getline(pin, line)) ++n;
  CHECK(n == 3);

  ExperimentSpec spec;
  spec.dgp = DgpSpec{DgpId::dgp0, 40, 10, 0};
  spec.R = 1;
  spec.B = 3;
  const CellResult c0 = run_cell(spec);
  spec.dgp.id = DgpId::dgp3;
  const CellResult c3 = run_cell(spec);
  write_cells_csv({c0, c3}, dir / "cells.csv");
  std::ifstream cin(dir / "cells.csv");
  std::getline(cin, line);
  CHECK(line == "dgp,n,d,statistic,level,rejection_rate,mc_se,R,B,J");
  n = 0;
  while (std::getline(cin, line)) {
    if (n == 0) CHECK(line.rfind("dgp0,40,10,proj1,", 0) == 0);
    ++n;
  }
  CHECK(n == 8);
  std::filesystem::remove_all(dir);
}
