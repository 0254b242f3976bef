#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

#ifndef KCHECK_BIN
#error "KCHECK_BIN must name the CLI executable"
#endif

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "kcheck_cli_test";

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" KCHECK_BIN "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) ++n;
  return n;
}

fs::path toy_csv() {
  fs::create_directories(kWork);
  const fs::path p = kWork / "toy.csv";
  std::ofstream out(p);
  out << "y,x1,x2,t\n";
  for (int i = 0; i < 60; ++i) {
    const double x1 = std::sin(0.7 * i), x2 = std::cos(1.3 * i);
    out << 1.0 + x1 - 0.5 * x2 + 0.3 * std::sin(5.1 * i) << ',' << x1 << ',' << x2 << ',' << (x1 + 0.4 * std::cos(3.7 * i) > 0 ? 1 : 0) << '\n';
  }
  return p;
}

}  // namespace

TEST_CASE("exit codes") {
  const fs::path csv = toy_csv();
  const std::string in = " --input " + csv.string() + " --out " + (kWork / "o").string();
  CHECK(run("--help") == 0);
  CHECK(run("") == 2);
  CHECK(run("test") == 2);
  CHECK(run("test --no-such-flag 1" + in) == 2);
  CHECK(run("test --y-col nope --B 9" + in) == 2);
  CHECK(run("test --y-col y --statistic proj9 --B 9" + in) == 2);
  CHECK(run("test --y-col y --level 1.5 --B 9" + in) == 2);
  CHECK(run("test --y-col y --gamma -1 --B 9" + in) == 2);
  CHECK(run("test --input /nonexistent.csv --y-col y") == 2);
  CHECK(run("simulate --dgp dgp5 --d 3 --R 1 --B 1 --out " + (kWork / "o").string()) == 2);
  CHECK(run("test --y-col y --x-cols x1,x2 --B 9" + in) == 0);

  const fs::path sep = kWork / "sep.csv";
  std::ofstream(sep) << "y,x,t\n1,-3,0\n2,-2,0\n1,-1,0\n3,1,1\n2,2,1\n1,3,1\n";
  CHECK(run("test --input " + sep.string() + " --y-col y --t-col t --x-cols x --model probit --B 9 --out " +
            (kWork / "o").string()) == 3);
}

TEST_CASE("test reports are byte-identical across runs and worker counts") {
  const fs::path csv = toy_csv();
  const std::string base = "test --input " + csv.string() + " --y-col y --x-cols x1,x2 --B 49 --seed 5 --statistic proj1,proj2,rand1,rand2,gp,icm";
  REQUIRE(run(base + " --out " + (kWork / "a").string()) == 0);
  REQUIRE(run(base + " --workers 3 --out " + (kWork / "b").string()) == 0);
  const std::string a = slurp(kWork / "a" / "report.json");
  CHECK(!a.empty());
  CHECK(a == slurp(kWork / "b" / "report.json"));
  CHECK(fs::exists(kWork / "a" / "report.txt"));
  const auto j = nlohmann::json::parse(a);
  CHECK(j["sections"][0]["tests"].size() == 6);
  CHECK(j["seed"].get<int>() == 5);
  CHECK(j["leverage_adjust"].get<bool>() == false);

  REQUIRE(run(base + " --leverage-adjust --out " + (kWork / "c").string()) == 0);
  const auto c = nlohmann::json::parse(slurp(kWork / "c" / "report.json"));
  CHECK(c["leverage_adjust"].get<bool>() == true);
  CHECK(c["sections"][0]["tests"][0]["value"] == j["sections"][0]["tests"][0]["value"]);
}

TEST_CASE("probit and joint models from the CLI") {
  const fs::path csv = toy_csv();
  const std::string base = "test --input " + csv.string() + " --y-col y --t-col t --x-cols x1,x2 --B 9";
  CHECK(run(base + " --model probit --out " + (kWork / "p").string()) == 0);
  CHECK(run(base + " --model probit_cate_joint --out " + (kWork / "q").string()) == 0);
  const auto j = nlohmann::json::parse(slurp(kWork / "q" / "report.json"));
  CHECK(j["sections"][0]["q"].get<int>() == 2);
  CHECK(run(base + " --model probit --statistic icm --out " + (kWork / "r").string()) == 2);
}

TEST_CASE("config file, flag precedence and output directory variable") {
  const fs::path csv = toy_csv();
  const fs::path cfg = kWork / "cfg.json";
  std::ofstream(cfg) << "{\"input\": \"" << csv.string() << "\", \"y_col\": \"y\", \"x_cols\": [\"x1\", \"x2\"], "
                     << "\"B\": 19, \"seed\": 3, \"statistics\": [\"proj2\"]}";
  REQUIRE(run("test --config " + cfg.string() + " --seed 9", "KCHECK_OUTPUT_DIR=" + (kWork / "env").string()) == 0);
  const auto j = nlohmann::json::parse(slurp(kWork / "env" / "report.json"));
  CHECK(j["B"].get<int>() == 19);
  CHECK(j["seed"].get<int>() == 9);
  CHECK(j["sections"][0]["tests"].size() == 1);

  const fs::path bad = kWork / "bad.json";
  std::ofstream(bad) << "{\"bogus_key\": 1}";
  CHECK(run("test --config " + bad.string()) == 2);
  std::ofstream(bad) << "{ not json";
  CHECK(run("test --config " + bad.string()) == 2);
}

TEST_CASE("simulate, tune, witness and power-vs-j outputs") {
  const std::string out = " --out " + (kWork / "s").string();
  REQUIRE(run("simulate --dgp dgp0,dgp3 --n 40 --R 2 --B 9 --statistic proj1,gp" + out) == 0);
  CHECK(count_lines(kWork / "s" / "simulate.csv") == 1 + 2 * 2);

  REQUIRE(run("tune --dgp dgp1 --n 50" + out) == 0);
  CHECK(count_lines(kWork / "s" / "cv_table.csv") == 1 + 7 * 5 * 5);

  REQUIRE(run("witness --dgp fig1_dgp1 --n 60 --resolution 5" + out) == 0);
  CHECK(count_lines(kWork / "s" / "witness.csv") == 1 + 25);
  CHECK(run("witness --dgp dgp1 --n 60" + out) == 2);

  REQUIRE(run("power-vs-j --dgp dgp2 --n 40 --R 2 --B 9 --J-values 1,2,3" + out) == 0);
  CHECK(count_lines(kWork / "s" / "power_vs_J.csv") == 1 + 3);
  CHECK(run("power-vs-j --dgp dgp2 --n 40 --R 1 --B 9 --J-values 0" + out) == 2);
  fs::remove_all(kWork);
}
