// Command-line front end; talks to the library exclusively through the
// C API in mixsym.h.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mixsym.h"

namespace {

constexpr const char* kExitCodeDoc =
    "Exit codes:\n"
    "  0  success\n"
    "  1  usage error\n"
    "  2  I/O error (unreadable input or unwritable output)\n"
    "  3  fit or computation failure\n"
    "  4  singular mixing matrix (lambda1 within 1e-6 of 1/2)\n"
    "  5  unsupported feature (e.g. k > 3)\n"
    "  6  internal error\n";

int exit_code_for(mixsym_status status) {
  switch (status) {
    case MIXSYM_OK: return 0;
    case MIXSYM_ERROR_INVALID: return 1;
    case MIXSYM_ERROR_IO: return 2;
    case MIXSYM_ERROR_FIT: return 3;
    case MIXSYM_ERROR_SINGULAR: return 4;
    case MIXSYM_ERROR_UNSUPPORTED: return 5;
    case MIXSYM_ERROR_INTERNAL: return 6;
  }
  return 6;
}

int fail(mixsym_status status, const std::string& stage) {
  std::fprintf(stderr, "mixsym: %s: %s\n", stage.c_str(), mixsym_last_error());
  return exit_code_for(status);
}

struct SampleHandle {
  mixsym_sample* ptr = nullptr;
  ~SampleHandle() { mixsym_sample_free(ptr); }
};

struct FitHandle {
  mixsym_fit_result* ptr = nullptr;
  ~FitHandle() { mixsym_fit_result_free(ptr); }
};

struct CurveHandle {
  mixsym_curve* ptr = nullptr;
  ~CurveHandle() { mixsym_curve_free(ptr); }
};

struct OwnedString {
  char* ptr = nullptr;
  ~OwnedString() { mixsym_string_free(ptr); }
};

bool parse_p(const std::string& text, double* out) {
  if (text == "inf" || text == "Inf" || text == "INF") {
    *out = HUGE_VAL;
    return true;
  }
  try {
    std::size_t pos = 0;
    *out = std::stod(text, &pos);
    return pos == text.size();
  } catch (const std::exception&) {
    return false;
  }
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) return false;
  out << content;
  return static_cast<bool>(out);
}

bool read_file(const std::string& path, std::string* content) {
  std::ifstream in(path);
  if (!in) return false;
  std::ostringstream buf;
  buf << in.rdbuf();
  *content = buf.str();
  return true;
}

void print_fit_line(const char* method, mixsym_fit_result* fit) {
  const int k = mixsym_fit_components(fit);
  std::vector<double> lambda(static_cast<std::size_t>(k));
  std::vector<double> mu(static_cast<std::size_t>(k));
  mixsym_fit_params(fit, lambda.data(), mu.data());
  std::printf("%-6s", method);
  for (int i = 0; i < k; ++i) std::printf("  mu%d=%.4f", i + 1, mu[static_cast<std::size_t>(i)]);
  for (int i = 0; i + 1 < k || k == 1; ++i) {
    std::printf("  lambda%d=%.4f", i + 1, lambda[static_cast<std::size_t>(i)]);
    if (k == 1) break;
  }
  const double sigma2 = mixsym_fit_sigma2(fit);
  if (std::isfinite(sigma2)) std::printf("  sigma2=%.4f", sigma2);
  std::printf("  objective=%.6g\n", mixsym_fit_objective(fit));
}

struct FitArgs {
  std::string input;
  int k = 2;
  std::string method = "sp";
  std::string p_text = "2";
  std::uint64_t seed = 0;
  std::string out;
};

int run_fit(const FitArgs& args) {
  double p = 2.0;
  if (!parse_p(args.p_text, &p)) {
    std::fprintf(stderr, "mixsym: invalid --p value: %s\n", args.p_text.c_str());
    return 1;
  }
  SampleHandle sample;
  mixsym_status status = mixsym_sample_read_csv(args.input.c_str(), &sample.ptr);
  if (status != MIXSYM_OK) return fail(status, "reading " + args.input);

  mixsym_fit_options opts;
  mixsym_fit_options_init(&opts);
  opts.p = p;
  opts.seed = args.seed;

  FitHandle fit;
  if (args.method == "sp")
    status = mixsym_fit_sp(sample.ptr, args.k, &opts, &fit.ptr);
  else
    status = mixsym_fit_nmle(sample.ptr, &opts, &fit.ptr);
  if (status != MIXSYM_OK) return fail(status, args.method + " fit");

  print_fit_line(args.method.c_str(), fit.ptr);
  OwnedString json;
  status = mixsym_fit_to_json(fit.ptr, &json.ptr);
  if (status != MIXSYM_OK) return fail(status, "serializing fit");
  if (args.out.empty()) {
    std::printf("%s\n", json.ptr);
  } else if (!write_file(args.out, std::string(json.ptr) + "\n")) {
    std::fprintf(stderr, "mixsym: cannot write %s\n", args.out.c_str());
    return 2;
  }
  return 0;
}

struct G0Args {
  std::string input;
  std::string from_fit;
  bool isotonic = false;
  std::uint64_t seed = 0;
  std::string out;
};

int run_g0(const G0Args& args) {
  SampleHandle sample;
  mixsym_status status = mixsym_sample_read_csv(args.input.c_str(), &sample.ptr);
  if (status != MIXSYM_OK) return fail(status, "reading " + args.input);

  double lambda[2];
  double mu[2];
  if (!args.from_fit.empty()) {
    std::string text;
    if (!read_file(args.from_fit, &text)) {
      std::fprintf(stderr, "mixsym: cannot read %s\n", args.from_fit.c_str());
      return 2;
    }
    FitHandle fit;
    status = mixsym_fit_from_json(text.c_str(), &fit.ptr);
    if (status != MIXSYM_OK) return fail(status, "parsing " + args.from_fit);
    if (mixsym_fit_components(fit.ptr) != 2) {
      std::fprintf(stderr, "mixsym: %s is not a two-component fit\n",
                   args.from_fit.c_str());
      return 1;
    }
    mixsym_fit_params(fit.ptr, lambda, mu);
  } else {
    mixsym_fit_options opts;
    mixsym_fit_options_init(&opts);
    opts.seed = args.seed;
    FitHandle fit;
    status = mixsym_fit_sp(sample.ptr, 2, &opts, &fit.ptr);
    if (status != MIXSYM_OK) return fail(status, "sp fit");
    mixsym_fit_params(fit.ptr, lambda, mu);
  }

  CurveHandle curve;
  status = mixsym_estimate_g0(sample.ptr, lambda, mu, args.isotonic ? 1 : 0,
                              &curve.ptr);
  if (status != MIXSYM_OK) return fail(status, "deconvolution");

  OwnedString csv;
  status = mixsym_curve_to_csv(curve.ptr, &csv.ptr);
  if (status != MIXSYM_OK) return fail(status, "serializing curve");
  if (args.out.empty()) {
    std::printf("%s", csv.ptr);
  } else if (!write_file(args.out, csv.ptr)) {
    std::fprintf(stderr, "mixsym: cannot write %s\n", args.out.c_str());
    return 2;
  }
  std::printf("monotone_violation=%.17g\n",
              mixsym_curve_monotone_violation(curve.ptr));
  return 0;
}

struct IdentArgs {
  int k = 2;
  std::vector<double> lambda;
  std::vector<double> mu;
};

int run_ident(const IdentArgs& args) {
  if (args.lambda.size() != static_cast<std::size_t>(args.k) ||
      args.mu.size() != static_cast<std::size_t>(args.k)) {
    std::fprintf(stderr, "mixsym: --lambda and --mu must each have k values\n");
    return 1;
  }
  double total = 0.0;
  for (double w : args.lambda) total += w;
  if (!(total > 0.0)) {
    std::fprintf(stderr, "mixsym: weights must have a positive sum\n");
    return 1;
  }
  std::vector<double> normalized = args.lambda;
  for (double& w : normalized) w /= total;

  OwnedString json;
  const mixsym_status status = mixsym_identifiability_json(
      args.k, normalized.data(), args.mu.data(), &json.ptr);
  if (status != MIXSYM_OK) return fail(status, "identifiability check");
  std::printf("%s\n", json.ptr);
  return 0;
}

struct BootArgs {
  std::string input;
  int B = 200;
  std::string method = "sp";
  std::uint64_t seed = 1;
  bool warm_start = false;
  std::string out;
};

int run_boot(const BootArgs& args) {
  SampleHandle sample;
  mixsym_status status = mixsym_sample_read_csv(args.input.c_str(), &sample.ptr);
  if (status != MIXSYM_OK) return fail(status, "reading " + args.input);

  mixsym_fit_options opts;
  mixsym_fit_options_init(&opts);
  opts.seed = args.seed;

  double warm[2];
  if (args.warm_start) {
    FitHandle fit;
    if (args.method == "sp")
      status = mixsym_fit_sp(sample.ptr, 2, &opts, &fit.ptr);
    else
      status = mixsym_fit_nmle(sample.ptr, &opts, &fit.ptr);
    if (status != MIXSYM_OK) return fail(status, "point fit for warm start");
    double lambda[2];
    mixsym_fit_params(fit.ptr, lambda, warm);
    opts.starts = warm;
    opts.n_starts = 1;
  }

  OwnedString json, table;
  status = mixsym_bootstrap_json(sample.ptr, args.method.c_str(), args.B,
                                 args.seed, &opts, &json.ptr, &table.ptr);
  if (status != MIXSYM_OK) return fail(status, "bootstrap");
  std::printf("%s", table.ptr);
  if (args.out.empty()) {
    std::printf("%s\n", json.ptr);
  } else if (!write_file(args.out, std::string(json.ptr) + "\n")) {
    std::fprintf(stderr, "mixsym: cannot write %s\n", args.out.c_str());
    return 2;
  }
  return 0;
}

struct SimArgs {
  std::string scenario;
  std::string out_prefix = "sim";
  bool full_replications = false;
};

int run_sim(const SimArgs& args) {
  std::string text;
  if (!read_file(args.scenario, &text)) {
    std::fprintf(stderr, "mixsym: cannot read %s\n", args.scenario.c_str());
    return 2;
  }
  std::uint64_t seed = 0;
  int replications = 0;
  mixsym_status status = mixsym_scenario_info(text.c_str(), &seed, &replications);
  if (status != MIXSYM_OK) return fail(status, "parsing " + args.scenario);

  OwnedString rows, summary;
  status = mixsym_run_scenario(text.c_str(), args.full_replications ? 200 : 0,
                               &rows.ptr, &summary.ptr);
  if (status != MIXSYM_OK) return fail(status, "running scenario");

  const std::string base = args.out_prefix + "_seed" + std::to_string(seed);
  const std::string rows_path = base + ".csv";
  const std::string summary_path = base + "_summary.json";
  if (!write_file(rows_path, rows.ptr) ||
      !write_file(summary_path, std::string(summary.ptr) + "\n")) {
    std::fprintf(stderr, "mixsym: cannot write results under prefix %s\n",
                 args.out_prefix.c_str());
    return 2;
  }
  std::printf("wrote %s and %s\n", rows_path.c_str(), summary_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "mixsym: fits k-component location mixtures of an unknown symmetric "
      "distribution by minimizing the asymmetry distance of the deconvolved "
      "empirical CDF, recovers the component CDF, decides identifiability of "
      "parameter points, and benchmarks against an equal-variance normal "
      "mixture EM baseline."};
  app.name("mixsym");
  app.footer(kExitCodeDoc);
  app.require_subcommand(1);

  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "Fit a mixture to a sample CSV");
  fit->add_option("input", fit_args.input, "sample CSV (one value per line, '#' comments)")
      ->required();
  fit->add_option("--k", fit_args.k, "number of components (1, 2 or 3)")
      ->default_val(2)
      ->check(CLI::Range(1, 3));
  fit->add_option("--method", fit_args.method, "estimator: sp or nmle")
      ->default_val("sp")
      ->check(CLI::IsMember({"sp", "nmle"}));
  fit->add_option("--p", fit_args.p_text,
                  "distance exponent in [1, inf]; \"inf\" for the sup norm (sp only)")
      ->default_val("2");
  fit->add_option("--seed", fit_args.seed, "seed for randomized restarts")
      ->default_val(0);
  fit->add_option("--out", fit_args.out, "write the fit JSON here instead of stdout");

  G0Args g0_args;
  auto* g0 = app.add_subcommand(
      "g0", "Estimate the component CDF from a two-component fit");
  g0->add_option("input", g0_args.input, "sample CSV")->required();
  g0->add_option("--from-fit", g0_args.from_fit,
                 "reuse a saved fit JSON instead of refitting");
  g0->add_flag("--isotonic", g0_args.isotonic,
               "apply the monotone envelope to the exported curve (plotting aid)");
  g0->add_option("--seed", g0_args.seed, "seed for the inline fit")->default_val(0);
  g0->add_option("--out", g0_args.out, "write the curve CSV here instead of stdout");

  IdentArgs ident_args;
  auto* ident = app.add_subcommand(
      "ident", "Decide identifiability of a parameter point (k <= 3)");
  ident->add_option("--k", ident_args.k, "number of components")
      ->required()
      ->check(CLI::Range(1, 16));
  ident->add_option("--lambda", ident_args.lambda,
                    "comma-separated weights (normalized to sum 1)")
      ->required()
      ->delimiter(',');
  ident->add_option("--mu", ident_args.mu, "comma-separated increasing locations")
      ->required()
      ->delimiter(',');

  BootArgs boot_args;
  auto* boot = app.add_subcommand("boot", "Bootstrap standard errors (k = 2)");
  boot->add_option("input", boot_args.input, "sample CSV")->required();
  boot->add_option("--B", boot_args.B, "number of resamples")
      ->default_val(200)
      ->check(CLI::Range(2, 1000000));
  boot->add_option("--method", boot_args.method, "estimator: sp or nmle")
      ->default_val("sp")
      ->check(CLI::IsMember({"sp", "nmle"}));
  boot->add_option("--seed", boot_args.seed, "base seed for the resample substreams")
      ->default_val(1);
  boot->add_flag("--warm-start", boot_args.warm_start,
                 "refit resamples from the point estimate only (faster, "
                 "skips the multi-start protocol)");
  boot->add_option("--out", boot_args.out, "write the report JSON here instead of stdout");

  SimArgs sim_args;
  auto* sim = app.add_subcommand("sim", "Run a simulation scenario JSON");
  sim->add_option("scenario", sim_args.scenario, "scenario JSON file")->required();
  sim->add_option("--out", sim_args.out_prefix,
                  "output prefix; writes <prefix>_seed<seed>.csv and "
                  "<prefix>_seed<seed>_summary.json")
      ->default_val("sim");
  sim->add_flag("--full-replications", sim_args.full_replications,
                "run 200 replications regardless of the scenario file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (fit->parsed()) return run_fit(fit_args);
  if (g0->parsed()) return run_g0(g0_args);
  if (ident->parsed()) return run_ident(ident_args);
  if (boot->parsed()) return run_boot(boot_args);
  if (sim->parsed()) return run_sim(sim_args);
  return 1;
}
