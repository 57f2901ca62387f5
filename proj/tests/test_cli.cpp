// End-to-end tests of the kappaln executable: exit codes, deterministic
// output under a fixed seed, CSV round-trips, and config-file handling.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

#ifndef KAPPALN_CLI_PATH
#error "KAPPALN_CLI_PATH must point at the kappaln executable"
#endif
#ifndef KAPPALN_FIXTURE_DIR
#error "KAPPALN_FIXTURE_DIR must point at the generated fixtures"
#endif

namespace {

const std::string kCli = KAPPALN_CLI_PATH;
const std::string kFixtures = KAPPALN_FIXTURE_DIR;

int run(const std::string& args) {
  const int status = std::system((kCli + " " + args + " > /dev/null 2>&1").c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_CASE("success paths exit 0") {
  CHECK(run("moments --mu 5 --sigma 2 --kappa 0.5 --orders 3 --output /tmp/kcli_m.csv") == 0);
  CHECK(run("tabulate --what pdf --mu 0 --sigma 1 --kappa 0.5 --min 0.01 --max 8 --points 50 --output /tmp/kcli_t.csv") == 0);
  CHECK(run("simulate --kernel ldho --n 16 --realizations 2 --seed 3 --output /tmp/kcli_s.csv") == 0);
  CHECK(run("fit --input " + kFixtures + "/ldho_series.csv --output /tmp/kcli_f.json") == 0);
}

TEST_CASE("exit code 2 on malformed input") {
  CHECK(run("fit --input /tmp/kcli_definitely_missing.csv") == 2);
  write_file("/tmp/kcli_bad.csv", "value\n1.0\nnot_a_number\n");
  CHECK(run("fit --input /tmp/kcli_bad.csv") == 2);
  write_file("/tmp/kcli_ragged.csv", "t,value\n1,2\n3\n");
  CHECK(run("fit --input /tmp/kcli_ragged.csv") == 2);
  CHECK(run("fit --input " + kFixtures +
            "/ldho_series.csv --method bogus") == 2);
}

TEST_CASE("exit code 3 on domain violations") {
  std::string neg = "value\n";
  for (int i = 0; i < 12; ++i) neg += std::to_string(i - 2) + ".5\n";
  write_file("/tmp/kcli_neg.csv", neg);
  CHECK(run("fit --input /tmp/kcli_neg.csv") == 3);
  CHECK(run("moments --mu 0 --sigma -1 --kappa 0.5") == 3);
  CHECK(run("simulate --kernel bogus --n 8") == 3);
  CHECK(run("tabulate --what quantile --min 0.2 --max 1.5") == 3);
  CHECK(run("forecast --input " + kFixtures +
            "/ldho_series.csv --train-frac 1.0") == 3);
}

TEST_CASE("exit code 4 on numerical failure") {
  // tau_c = 0 poisons the covariance with NaNs and the factorization fails
  CHECK(run("simulate --kernel ldho --tau-c 0 --n 8") == 4);
}

TEST_CASE("simulate is byte-stable under a fixed seed") {
  CHECK(run("simulate --kernel ldho --n 32 --realizations 2 --seed 99 "
            "--output /tmp/kcli_a.csv") == 0);
  CHECK(run("simulate --kernel ldho --n 32 --realizations 2 --seed 99 "
            "--output /tmp/kcli_b.csv") == 0);
  CHECK(slurp("/tmp/kcli_a.csv") == slurp("/tmp/kcli_b.csv"));
  CHECK(run("simulate --kernel ldho --n 32 --realizations 2 --seed 100 "
            "--output /tmp/kcli_c.csv") == 0);
  CHECK(slurp("/tmp/kcli_a.csv") != slurp("/tmp/kcli_c.csv"));
  // metadata line pins the generator identity
  CHECK(slurp("/tmp/kcli_a.csv").rfind("# rng: xoshiro256++/polar seed: 99",
                                       0) == 0);
}

TEST_CASE("simulate output round-trips through fit") {
  CHECK(run("simulate --kernel ldho --mu 1 --sigma 1 --kappa 3 --tau-c 30 "
            "--omega-d 0.12566370614359174 --n 1024 --seed 555 "
            "--output /tmp/kcli_rt.csv") == 0);
  CHECK(run("fit --input /tmp/kcli_rt.csv --output /tmp/kcli_rt.json") == 0);
  const std::string report = slurp("/tmp/kcli_rt.json");
  const auto pos = report.find("\"kappa\": ");
  REQUIRE(pos != std::string::npos);
  const double kappa_hat = std::stod(report.substr(pos + 9));
  CHECK(kappa_hat > 2.5);
  CHECK(kappa_hat < 3.5);
}

TEST_CASE("config file supplies defaults and flags override it") {
  write_file("/tmp/kcli_cfg.json",
             R"({"mu": 5.0, "sigma": 2.0, "kappa": 0.5, "orders": 2})");
  CHECK(run("moments --config /tmp/kcli_cfg.json --output /tmp/kcli_cfg_a.csv") == 0);
  const std::string from_config = slurp("/tmp/kcli_cfg_a.csv");
  CHECK(run("moments --mu 5 --sigma 2 --kappa 0.5 --orders 2 "
            "--output /tmp/kcli_cfg_b.csv") == 0);
  CHECK(from_config == slurp("/tmp/kcli_cfg_b.csv"));
  // a flag on the command line wins over the config value
  CHECK(run("moments --config /tmp/kcli_cfg.json --kappa 0.75 "
            "--output /tmp/kcli_cfg_c.csv") == 0);
  CHECK(from_config != slurp("/tmp/kcli_cfg_c.csv"));
  write_file("/tmp/kcli_cfg_bad.json", "{not json");
  CHECK(run("moments --config /tmp/kcli_cfg_bad.json --sigma 2 --kappa 0.5") == 2);
}

TEST_CASE("tabulated pdf integrates to one") {
  CHECK(run("tabulate --what pdf --mu 0 --sigma 1 --kappa 0.5 --min 1e-4 "
            "--max 60 --points 4000 --output /tmp/kcli_pdf.csv") == 0);
  std::ifstream in("/tmp/kcli_pdf.csv");
  std::string line;
  std::getline(in, line);  // header
  double prev_x = 0.0, prev_f = 0.0, integral = 0.0;
  bool first = true;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    const double x = std::stod(line.substr(0, comma));
    const double f = std::stod(line.substr(comma + 1));
    if (!first) integral += 0.5 * (f + prev_f) * (x - prev_x);
    prev_x = x;
    prev_f = f;
    first = false;
  }
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-3));
}
