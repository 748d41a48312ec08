#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "test_util.hpp"

namespace {

struct CommandResult {
  int exit_code;
  std::string output;
};

// Runs the CLI with stdout+stderr captured through a temp file.
CommandResult run_cli(const std::string& args) {
  const std::string out_path = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") +
                               "/mixsym_cli_out.txt";
  const std::string cmd =
      std::string("\"") + MIXSYM_CLI_PATH + "\" " + args + " > " + out_path + " 2>&1";
  const int raw = std::system(cmd.c_str());
  std::ifstream in(out_path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return {WEXITSTATUS(raw), buf.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("cli --help matches the golden file and documents exit codes") {
  const CommandResult r = run_cli("--help");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("Exit codes:") != std::string::npos);
  for (const char* flag : {"fit", "g0", "ident", "boot", "sim"})
    CHECK(r.output.find(flag) != std::string::npos);
  const std::string golden = slurp(std::string(MIXSYM_TEST_DATA_DIR) + "/cli_help.txt");
  CHECK(r.output == golden);
}

TEST_CASE("cli fit on the bundled dataset") {
  const std::string fit_json = "/tmp/mixsym_test_fit.json";
  const CommandResult r = run_cli("fit --k 2 --method sp --out " + fit_json + " \"" +
                                  testutil::faithful_path() + "\"");
  REQUIRE(r.exit_code == 0);
  CHECK(r.output.find("mu1=54.0") != std::string::npos);
  CHECK(r.output.find("mu2=80.0") != std::string::npos);
  const std::string json = slurp(fit_json);
  CHECK(json.find("\"method\": \"sp\"") != std::string::npos);

  SUBCASE("g0 --from-fit reproduces the inline curve bit for bit") {
    const std::string curve_a = "/tmp/mixsym_test_g0_a.csv";
    const std::string curve_b = "/tmp/mixsym_test_g0_b.csv";
    const CommandResult a = run_cli("g0 --from-fit " + fit_json + " --out " + curve_a +
                                    " \"" + testutil::faithful_path() + "\"");
    REQUIRE(a.exit_code == 0);
    CHECK(a.output.find("monotone_violation=") != std::string::npos);
    const CommandResult b = run_cli("g0 --out " + curve_b + " \"" +
                                    testutil::faithful_path() + "\"");
    REQUIRE(b.exit_code == 0);
    CHECK(slurp(curve_a) == slurp(curve_b));
  }
}

TEST_CASE("cli fit k=1 on a symmetric toy file") {
  const std::string toy = "/tmp/mixsym_toy.csv";
  {
    std::ofstream out(toy);
    out << "# toy\n-1\n0\n1\n";
  }
  const CommandResult r = run_cli("fit --k 1 " + toy);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("mu1=0.0000") != std::string::npos);
}

TEST_CASE("cli exit codes") {
  SUBCASE("missing input file is an I/O error") {
    CHECK(run_cli("fit /does/not/exist.csv").exit_code == 2);
  }
  SUBCASE("singular mixing matrix trips exit 4") {
    const std::string sym = "/tmp/mixsym_sym.csv";
    {
      std::ofstream out(sym);
      // A fit JSON with lambda exactly 1/2 drives the guard directly.
      out << "-1.1\n-0.9\n0.9\n1.1\n";
    }
    const std::string fit_json = "/tmp/mixsym_sym_fit.json";
    {
      std::ofstream out(fit_json);
      out << R"({"lambda": [0.5, 0.5], "mu": [-1.0, 1.0]})";
    }
    const CommandResult r = run_cli("g0 --from-fit " + fit_json + " " + sym);
    CHECK(r.exit_code == 4);
  }
  SUBCASE("usage errors exit 1") {
    CHECK(run_cli("fit --k 7 /tmp/whatever.csv").exit_code == 1);
    CHECK(run_cli("nonsense").exit_code == 1);
  }
}

TEST_CASE("cli ident prints the case tag") {
  const CommandResult r = run_cli("ident --k 3 --lambda 4,3,2 --mu 0,4,6");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("CASE_A2") != std::string::npos);
  CHECK(r.output.find("\"member\": false") != std::string::npos);
}

TEST_CASE("cli boot minimal run") {
  const std::string tiny = "/tmp/mixsym_tiny.csv";
  {
    std::ofstream out(tiny);
    out << "1\n2\n4\n";
  }
  const CommandResult r = run_cli("boot --B 2 --seed 3 " + tiny);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("\"B\": 2") != std::string::npos);
}

TEST_CASE("cli sim writes seed-stamped outputs") {
  const std::string scenario = "/tmp/mixsym_scenario.json";
  {
    std::ofstream out(scenario);
    out << R"({"component": "laplace",
               "truth": {"lambda": [0.3, 0.7], "mu": [-1.0, 1.0]},
               "n": 60, "replications": 1, "seed": 12})";
  }
  const CommandResult r = run_cli("sim --out /tmp/mixsym_sim " + scenario);
  REQUIRE(r.exit_code == 0);
  const std::string rows = slurp("/tmp/mixsym_sim_seed12.csv");
  int lines = 0;
  for (char c : rows)
    if (c == '\n') ++lines;
  CHECK(lines == 3);  // header + sp + nmle
  CHECK(slurp("/tmp/mixsym_sim_seed12_summary.json").find("\"summaries\"") !=
        std::string::npos);
}
