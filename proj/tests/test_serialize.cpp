#include <doctest.h>

#include "mixsym/optimize.hpp"
#include "mixsym/serialize.hpp"
#include "test_util.hpp"

using namespace mixsym;

TEST_CASE("fit JSON round-trips the parameters losslessly") {
  const Sample faithful = testutil::load_faithful();
  const FitResult fit = fit_k2(faithful);
  const std::string json = fit_result_to_json(fit, "sp", 2.0, faithful.size(),
                                              faithful.label());
  const MixtureParams back = fit_params_from_json(json);
  CHECK(back.weights == fit.params.weights);      // bitwise
  CHECK(back.locations == fit.params.locations);  // bitwise
  CHECK(json.find("\"per_start\"") != std::string::npos);
  CHECK(json.find("\"warnings\"") != std::string::npos);
  CHECK_THROWS_AS(fit_params_from_json("{}"), std::invalid_argument);
}

TEST_CASE("verdict JSON carries reason, witness and warnings") {
  const MixtureParams params({4.0 / 9, 3.0 / 9, 2.0 / 9}, {0.0, 4.0, 6.0});
  const std::string json =
      verdict_to_json(params, in_omega3_star(params));
  CHECK(json.find("\"member\": false") != std::string::npos);
  CHECK(json.find("CASE_A2") != std::string::npos);
  CHECK(json.find("\"witness\"") != std::string::npos);
}

TEST_CASE("bootstrap report JSON and table") {
  BootstrapReport report;
  report.B = 4;
  report.param_names = {"mu1", "mu2", "lambda1", "sigma2"};
  report.point = {54.0, 80.0, 0.352, 30.66};
  report.se = {0.76, 0.50, 0.032, 7.93};
  report.failures = 1;
  const std::string json = bootstrap_report_to_json(report, "sp", 42);
  CHECK(json.find("\"B\": 4") != std::string::npos);
  CHECK(json.find("\"failures\": 1") != std::string::npos);
  CHECK(json.find("\"mu1\"") != std::string::npos);
  const std::string table = format_estimate_table("sp", report.point, &report.se);
  CHECK(table.find("mu1") != std::string::npos);
  CHECK(table.find("54 (0.76)") != std::string::npos);
}
