#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "generators.hpp"
#include "kcheck/error.hpp"
#include "kcheck/tuning.hpp"

using namespace kcheck;
using kcheck::testing::Gen;

TEST_CASE("default grid") {
  Eigen::MatrixXd X(3, 1);
  X << 0, 1, 3;
  const TuneGrid grid = default_grid(X);
  REQUIRE(grid.gamma_grid.size() == 7);
  CHECK(grid.gamma_grid[3] == 0.5);
  CHECK(grid.gamma_grid.front() == 0.5 / 8);
  CHECK(grid.gamma_grid.back() == 0.5 * 8);
  CHECK(grid.lambda_grid == std::vector<double>{1e-4, 1e-3, 1e-2, 1e-1, 1.0});
  CHECK(std::is_sorted(grid.gamma_grid.begin(), grid.gamma_grid.end()));
  CHECK(grid.folds == 5);
  CHECK_NOTHROW(grid.validate());

  TuneGrid bad = grid;
  bad.folds = 1;
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad = grid;
  bad.lambda_grid = {1.0, 0.1};
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad = grid;
  bad.gamma_grid.clear();
  CHECK_THROWS_AS(bad.validate(), InputError);
}

TEST_CASE("fold assignment is balanced and seeded") {
  for (Eigen::Index n : {5, 17, 200, 445}) {
    const auto f = fold_assignment(n, 5, 3);
    std::vector<int> count(5, 0);
    for (int v : f) ++count[v];
    CHECK(*std::max_element(count.begin(), count.end()) - *std::min_element(count.begin(), count.end()) <= 1);
    CHECK(fold_assignment(n, 5, 3) == f);
  }
  CHECK(fold_assignment(100, 5, 3) != fold_assignment(100, 5, 4));
}

TEST_CASE("degenerate target and singleton grid") {
  Gen g(61);
  const Eigen::MatrixXd X = g.matrix(30, 2);
  TuneGrid grid = default_grid(X, 1);
  for (CvRule rule : {CvRule::min, CvRule::one_se}) {
    grid.rule = rule;
    const TuneResult r = tune(X, Eigen::VectorXd::Zero(30), grid);
    CHECK(r.gamma == grid.gamma_grid.front());
    CHECK(r.lambda == grid.lambda_grid.back());
    CHECK(r.cv_score == 0.0);
    CHECK(r.cv_table.size() == 7 * 5 * 5);
  }
  TuneGrid single = grid;
  single.gamma_grid = {0.3};
  single.lambda_grid = {0.02};
  const TuneResult s = tune(X, g.vector(30), single);
  CHECK(s.gamma == 0.3);
  CHECK(s.lambda == 0.02);

  TuneGrid many = grid;
  many.folds = 20;
  CHECK_THROWS_AS(tune(X, g.vector(30), many), InputError);
}

TEST_CASE("planted smooth signal beats the predict-zero baseline") {
  Gen g(62);
  const Eigen::Index n = 200;
  const Eigen::MatrixXd X = g.matrix(n, 1);
  Eigen::VectorXd eps(n);
  for (Eigen::Index i = 0; i < n; ++i) eps(i) = std::sin(2.0 * X(i, 0)) + 0.1 * g.normal();
  for (CvRule rule : {CvRule::min, CvRule::one_se}) {
    TuneGrid grid = default_grid(X, 5);
    grid.rule = rule;
    const TuneResult r = tune(X, eps, grid);
    CHECK(r.lambda < grid.lambda_grid.back());
    CHECK(r.cv_score < eps.squaredNorm() / n);
    CHECK(std::find(grid.gamma_grid.begin(), grid.gamma_grid.end(), r.gamma) != grid.gamma_grid.end());
  }
}

TEST_CASE("one-SE choice is within one standard error and never less regularized") {
  Gen g(63);
  for (int t = 0; t < 10; ++t) {
    const Eigen::Index n = 80;
    const Eigen::MatrixXd X = g.matrix(n, 2);
    Eigen::VectorXd eps = g.vector(n);
    if (t % 2) eps += (X.col(0).array() * X.col(1).array()).matrix();
    TuneGrid grid = default_grid(X, t);
    grid.rule = CvRule::min;
    const TuneResult best = tune(X, eps, grid);
    grid.rule = CvRule::one_se;
    const TuneResult se = tune(X, eps, grid);
    CHECK(se.cv_score >= best.cv_score);
    CHECK(se.lambda >= best.lambda);
    double sum = 0.0, sq = 0.0;
    for (const CvCell& c : best.cv_table)
      if (c.gamma == best.gamma && c.lambda == best.lambda) {
        const double mse = c.sse / c.n_holdout;
        sum += mse;
        sq += mse * mse;
      }
    const int K = grid.folds;
    const double sd = std::sqrt(std::max(0.0, (sq - sum * sum / K) / (K - 1)));
    CHECK(se.cv_score <= best.cv_score + sd / std::sqrt(double(K)) * 1.0000001 + 1e-15);
  }
}

TEST_CASE("cv score is invariant to observation order given the folds") {
  Gen g(64);
  const Eigen::MatrixXd X = g.matrix(60, 2);
  const Eigen::MatrixXd eps = g.matrix(60, 2);
  const TuneGrid grid = default_grid(X, 2);
  const auto folds = fold_assignment(60, grid.folds, grid.seed);
  const TuneResult a = tune_with_folds(X, eps, grid, folds);
  const Eigen::VectorXi p = g.permutation(60);
  std::vector<int> pf(60);
  for (int i = 0; i < 60; ++i) pf[i] = folds[p(i)];
  const TuneResult b = tune_with_folds(kcheck::testing::permute_rows(X, p), kcheck::testing::permute_rows(eps, p),
                                       grid, pf);
  CHECK(a.gamma == b.gamma);
  CHECK(a.lambda == b.lambda);
  REQUIRE(a.cv_table.size() == b.cv_table.size());
  for (std::size_t i = 0; i < a.cv_table.size(); ++i)
    CHECK(a.cv_table[i].sse == doctest::Approx(b.cv_table[i].sse).epsilon(1e-10));
  CHECK(tune(X, eps, grid).cv_score == a.cv_score);
}

TEST_CASE("cv table export") {
  Gen g(65);
  const Eigen::MatrixXd X = g.matrix(25, 2);
  const TuneResult r = tune(X, g.vector(25), default_grid(X));
  const auto path = std::filesystem::temp_directory_path() / "kcheck_test_cv_table.csv";
  write_cv_table_csv(r, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "gamma,lambda,fold,sse,n_holdout");
  int rows = 0;
  double total = 0.0;
  while (std::getline(in, line)) {
    ++rows;
    total += std::stod(line.substr(line.find(',', line.find(',', line.find(',') + 1) + 1) + 1));
  }
  CHECK(rows == static_cast<int>(r.cv_table.size()));
  double expect = 0.0;
  for (const auto& c : r.cv_table) expect += c.sse;
  CHECK(total == doctest::Approx(expect).epsilon(1e-14));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(write_cv_table_csv(r, "/nonexistent-dir/x/cv.csv"), IoError);
}
