// Acceptance suite: runs every shipping criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mixsym/comparator.hpp"
#include "mixsym/deconvolve.hpp"
#include "mixsym/harness.hpp"
#include "mixsym/identifiability.hpp"
#include "mixsym/objective.hpp"
#include "mixsym/optimize.hpp"
#include "test_util.hpp"

using namespace mixsym;
using nlohmann::json;

namespace {

struct Criterion {
  std::vector<std::string> failures;

  void check(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void check_near(double value, double target, double tol, const std::string& what) {
    if (!(std::abs(value - target) <= tol)) {
      std::ostringstream msg;
      msg << what << ": got " << value << ", want " << target << " +- " << tol;
      failures.push_back(msg.str());
    }
  }
};

int g_failed = 0;

void run(int number, const std::string& title,
         const std::function<void(Criterion&)>& body) {
  Criterion c;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.failures.push_back(std::string("exception: ") + e.what());
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (c.failures.empty()) {
    std::printf("PASS  criterion %2d: %s (%.1f s)\n", number, title.c_str(), seconds);
  } else {
    ++g_failed;
    std::printf("FAIL  criterion %2d: %s (%.1f s)\n", number, title.c_str(), seconds);
    for (const auto& f : c.failures) std::printf("      - %s\n", f.c_str());
  }
  std::fflush(stdout);
}

json run_cli_fit(const std::string& method, double* seconds) {
  const std::string out = "/tmp/mixsym_acc_fit_" + method + ".json";
  const std::string cmd = std::string("\"") + MIXSYM_CLI_PATH +
                          "\" fit --k 2 --method " + method + " --out " + out + " \"" +
                          testutil::faithful_path() + "\" > /dev/null 2>&1";
  const auto t0 = std::chrono::steady_clock::now();
  const int rc = std::system(cmd.c_str());
  *seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (rc != 0) throw std::runtime_error("CLI fit failed");
  std::ifstream in(out);
  return json::parse(in);
}

// Shared scenario for criteria 6 and 7.
struct TrendData {
  std::vector<double> err_lambda, err_mu1, err_mu2, sup_err;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

TrendData laplace_trend(int n, int replications, Criterion& c) {
  ScenarioSpec spec;
  spec.component = ComponentShape::laplace;
  spec.truth = MixtureParams({0.3, 0.7}, {-1.0, 1.0});
  spec.scale = 1.0;
  spec.n = n;
  spec.replications = replications;
  spec.seed = 20070301;
  TrendData data;
  CounterRng probe_rng(99);
  for (int rep = 0; rep < replications; ++rep) {
    const Sample sample = generate(spec, rep);
    const FitResult fit = fit_k2(sample);
    data.err_lambda.push_back(std::abs(fit.params.weights[0] - 0.3));
    data.err_mu1.push_back(std::abs(fit.params.locations[0] + 1.0));
    data.err_mu2.push_back(std::abs(fit.params.locations[1] - 1.0));
    const DeconvolutionResult dec = estimate_g0(sample, fit.params);
    const double b = 1.0 / std::sqrt(2.0);
    data.sup_err.push_back(testutil::sup_distance_to_cdf(
        dec.g0, [&](double z) { return testutil::laplace_cdf(z, b); }));
    for (int probe = 0; probe < 100; ++probe) {
      const double z = -5.0 + 10.0 * probe_rng.uniform01();
      c.check(std::abs(dec.g0(z) + dec.g0(-z) - 1.0) <= 1e-12,
              "zero-symmetry identity at a probe");
    }
  }
  return data;
}

}  // namespace

int main() {
  std::printf("mixsym acceptance suite\n");
  const auto suite_start = std::chrono::steady_clock::now();

  run(1, "Table 1 SP row from the CLI", [](Criterion& c) {
    double seconds = 0.0;
    const json fit = run_cli_fit("sp", &seconds);
    c.check(seconds < 30.0, "runtime under 30 s");
    c.check_near(fit["mu"][0].get<double>(), 54.00, 0.75, "mu1");
    c.check_near(fit["mu"][1].get<double>(), 80.00, 0.75, "mu2");
    c.check_near(fit["lambda"][0].get<double>(), 0.352, 0.015, "lambda1");
    c.check_near(fit["sigma2"].get<double>(), 30.66, 2.0, "sigma2");
  });

  run(2, "Table 1 NMLE row from the CLI", [](Criterion& c) {
    double seconds = 0.0;
    const json fit = run_cli_fit("nmle", &seconds);
    c.check(seconds < 5.0, "runtime under 5 s");
    c.check_near(fit["mu"][0].get<double>(), 54.61, 0.5, "mu1");
    c.check_near(fit["mu"][1].get<double>(), 80.09, 0.5, "mu2");
    c.check_near(fit["lambda"][0].get<double>(), 0.361, 0.01, "lambda1");
    c.check_near(fit["sigma2"].get<double>(), 34.45, 1.0, "sigma2");
  });

  run(3, "bootstrap SEs on faithful (B=200, SP)", [](Criterion& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const Sample faithful = testutil::load_faithful();
    const BootstrapReport report = bootstrap_se(
        faithful, make_sp_fitter(), {"mu1", "mu2", "lambda1", "sigma2"}, 200, 1);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.check(seconds < 300.0, "runtime under 5 min");
    const double targets[] = {0.76, 0.50, 0.032, 7.93};
    const char* names[] = {"se(mu1)", "se(mu2)", "se(lambda1)", "se(sigma2)"};
    for (int i = 0; i < 4; ++i) {
      const double lo = 0.6 * targets[i];
      const double hi = 1.4 * targets[i];
      std::ostringstream msg;
      msg << names[i] << " = " << report.se[static_cast<std::size_t>(i)] << " in ["
          << lo << ", " << hi << "]";
      c.check(report.se[static_cast<std::size_t>(i)] >= lo &&
                  report.se[static_cast<std::size_t>(i)] <= hi,
              msg.str());
    }
  });

  run(4, "V-statistic equals the exact-integration route (200 cases)",
      [](Criterion& c) {
        CounterRng rng(8675309);
        for (int rep = 0; rep < 200; ++rep) {
          const std::size_t n = 2 + rng.next_u64() % 99;
          const std::size_t k = 1 + rng.next_u64() % 3;
          const Sample s(testutil::random_values(rng, n, -5.0, 5.0));
          const MixtureParams params(
              testutil::random_simplex(rng, k),
              testutil::random_locations(rng, k, -3.0, 3.0, 0.02));
          const double d = dn(s, params, 2.0);
          const double v = dn2_vstat(s, params);
          const double err = std::abs(v - d * d);
          if (err >= 1e-9 * std::max(1.0, d * d)) {
            std::ostringstream msg;
            msg << "case " << rep << ": |vstat - dn^2| = " << err;
            c.failures.push_back(msg.str());
          }
        }
      });

  run(5, "Hodges-Lehmann reduction is exact (100 samples)", [](Criterion& c) {
    CounterRng rng(5150);
    for (int rep = 0; rep < 100; ++rep) {
      const std::size_t n = 1 + rng.next_u64() % 60;
      const Sample s(testutil::random_values(rng, n, -10.0, 10.0));
      const double mu = fit_k1(s);
      std::vector<double> means;
      means.reserve(n * n);
      for (double a : s.values())
        for (double b : s.values()) means.push_back(0.5 * (a + b));
      std::sort(means.begin(), means.end());
      const std::size_t total = means.size();
      const double expected = total % 2 == 1
                                  ? means[total / 2]
                                  : 0.5 * (means[total / 2 - 1] + means[total / 2]);
      c.check(mu == expected, "weighted-median oracle equality");
      // obj(t) - obj(mu) accumulated as paired differences; the plain sums
      // are ~1e4 in magnitude and would drown the comparison in rounding.
      const auto gap_from_mu = [&](double t) {
        double sum = 0.0, carry = 0.0;
        for (double m : means) {
          const double term = (std::abs(m - t) - std::abs(m - mu)) - carry;
          const double next = sum + term;
          carry = (next - sum) - term;
          sum = next;
        }
        return sum;
      };
      c.check(gap_from_mu(mu + 1e-6) >= -1e-9, "right perturbation");
      c.check(gap_from_mu(mu - 1e-6) >= -1e-9, "left perturbation");
    }
  });

  static TrendData trend200, trend2000;
  run(6, "consistency trend from n=200 to n=2000 (20 replications)",
      [](Criterion& c) {
        trend200 = laplace_trend(200, 20, c);
        trend2000 = laplace_trend(2000, 20, c);
        c.check(median(trend2000.err_lambda) < median(trend200.err_lambda),
                "median |lambda1 error| decreases");
        c.check(median(trend2000.err_mu1) < median(trend200.err_mu1),
                "median |mu1 error| decreases");
        c.check(median(trend2000.err_mu2) < median(trend200.err_mu2),
                "median |mu2 error| decreases");
      });

  run(7, "G0 sup-error shrinks and stays under 0.08 at n=2000", [](Criterion& c) {
    c.check(!trend200.sup_err.empty() && !trend2000.sup_err.empty(),
            "criterion 6 produced the shared replications");
    if (trend200.sup_err.empty() || trend2000.sup_err.empty()) return;
    const double sup200 = median(trend200.sup_err);
    const double sup2000 = median(trend2000.sup_err);
    std::ostringstream msg;
    msg << "median sup-error " << sup2000 << " (n=2000) vs " << sup200 << " (n=200)";
    c.check(sup2000 < sup200, msg.str());
    c.check(sup2000 < 0.08, "median sup-error under 0.08 at n=2000");
  });

  run(8, "identifiability suite", [](Criterion& c) {
    // (a) Theorem 2 verdicts on the boundary grid.
    const double grid[] = {0.0, 0.3, 0.5, 0.7, 1.0};
    const bool expect_member[] = {false, true, false, true, false};
    for (int i = 0; i < 5; ++i) {
      const MixtureParams p({grid[i], 1.0 - grid[i]}, {-1.0, 1.0});
      const auto v = in_omega2_star(p);
      std::ostringstream msg;
      msg << "lambda1 = " << grid[i] << " member=" << v.member;
      c.check(v.member == expect_member[i], msg.str());
      if (i == 0 || i == 4) c.check(v.reason == IdentReason::zero_weight, "zero-weight tag");
      if (i == 2) c.check(v.reason == IdentReason::lambda_half, "lambda-half tag");
    }

    // (b) the four excluded families with their convolution identities.
    CounterRng rng(271828);
    for (int rep = 0; rep < 100; ++rep) {
      const double c0 = -3.0 + 6.0 * rng.uniform01();
      const double d = 0.2 + 2.0 * rng.uniform01();
      const double r = 1.05 + 8.95 * rng.uniform01();

      auto normalized = [](std::vector<double> w, std::vector<double> mu) {
        double total = 0.0;
        for (double x : w) total += x;
        double partial = 0.0;
        for (std::size_t i = 0; i + 1 < w.size(); ++i) {
          w[i] /= total;
          partial += w[i];
        }
        w.back() = 1.0 - partial;
        return MixtureParams(std::move(w), std::move(mu));
      };
      const MixtureParams a2 = normalized({r * r, r * r - 1.0, r},
                                          {c0, c0 + 4.0 * d, c0 + 6.0 * d});
      const MixtureParams a3 = normalized({r, r + 1.0, 1.0},
                                          {c0 + d, c0 + 3.0 * d, c0 + 5.0 * d});
      const MixtureParams a4 =
          normalized({r * std::sqrt(r), (r - 1.0) * std::sqrt(r + 1.0), std::sqrt(r)},
                     {c0, c0 + 3.0 * d, c0 + 4.0 * d});
      const MixtureParams a5 = normalized({r, std::sqrt(r + r * r), 1.0},
                                          {c0 + d, c0 + 2.0 * d, c0 + 3.0 * d});
      c.check(in_omega3_star(a2).reason == IdentReason::case_a2, "A.2 tag");
      c.check(in_omega3_star(a3).reason == IdentReason::case_a3, "A.3 tag");
      c.check(in_omega3_star(a4).reason == IdentReason::case_a4, "A.4 tag");
      c.check(in_omega3_star(a5).reason == IdentReason::case_a5, "A.5 tag");

      const auto conv1 =
          convolve_finite(FinitePointDistribution::from_params(a2),
                          FinitePointDistribution::from_params(a3).reflected());
      c.check(is_zero_symmetric(conv1, 1e-9), "Case 1 convolution zero-symmetric");
      const double r2 = r * r, r3 = r * r * r;
      const std::vector<double> tau1{r2, r3 + r2, r3 + r2 - 1.0,
                                     r3 + r2 - 1.0, r3 + r2, r2};
      double total1 = 0.0;
      for (double t : tau1) total1 += t;
      bool tau_ok = conv1.atoms.size() == 6;
      for (std::size_t i = 0; tau_ok && i < 6; ++i)
        tau_ok = std::abs(conv1.weights[i] - tau1[i] / total1) <= 1e-9;
      c.check(tau_ok, "Case 1 tau weights");

      const auto conv2 =
          convolve_finite(FinitePointDistribution::from_params(a4),
                          FinitePointDistribution::from_params(a5).reflected());
      c.check(is_zero_symmetric(conv2, 1e-9), "Case 2 convolution zero-symmetric");
      const double sr = std::sqrt(r), sr1 = std::sqrt(r + 1.0);
      const std::vector<double> tau2{r * sr,     r2 * sr1, r2 * sr, (r - 1.0) * sr1,
                                     r2 * sr, r2 * sr1, r * sr};
      double total2 = 0.0;
      for (double t : tau2) total2 += t;
      tau_ok = conv2.atoms.size() == 7;
      for (std::size_t i = 0; tau_ok && i < 7; ++i)
        tau_ok = std::abs(conv2.weights[i] - tau2[i] / total2) <= 1e-9;
      c.check(tau_ok, "Case 2 tau weights");
    }

    // (c) brute-force symmetrizer counts.
    SymmetrizerGrid fine;
    fine.gap_denominators = {1, 2, 3, 4};
    const auto many =
        brute_force_symmetrizer(FinitePointDistribution({1.0, 5.0}, {0.5, 0.5}), 2, fine);
    c.check(many.size() >= 2, "lambda=1/2 point has at least two symmetrizers");
    const auto unique_one =
        brute_force_symmetrizer(FinitePointDistribution({-1.0, 1.0}, {0.3, 0.7}), 2);
    std::ostringstream msg;
    msg << "identifiable point has exactly one symmetrizer (got "
        << unique_one.size() << ")";
    c.check(unique_one.size() == 1, msg.str());
  });

  run(9, "SP beats NMLE on the t2 design (50 replications)", [](Criterion& c) {
    ScenarioSpec spec;
    spec.component = ComponentShape::student_t2;
    spec.truth = MixtureParams({0.3, 0.7}, {-2.0, 2.0});
    spec.scale = 1.0;
    spec.n = 200;
    spec.replications = 50;
    spec.seed = 31337;
    const ExperimentResult result = run_experiment(spec);
    const EstimatorSummary* sp = nullptr;
    const EstimatorSummary* nmle = nullptr;
    for (const auto& s : result.summaries) {
      if (s.estimator == "sp") sp = &s;
      if (s.estimator == "nmle") nmle = &s;
    }
    c.check(sp != nullptr && nmle != nullptr, "both estimators ran");
    if (sp == nullptr || nmle == nullptr) return;
    std::ostringstream m1, m2;
    m1 << "MSE(mu1): sp " << sp->mu1.mse << " < nmle " << nmle->mu1.mse;
    m2 << "MSE(mu2): sp " << sp->mu2.mse << " < nmle " << nmle->mu2.mse;
    c.check(sp->mu1.mse < nmle->mu1.mse, m1.str());
    c.check(sp->mu2.mse < nmle->mu2.mse, m2.str());
  });

  run(10, "equivariance suite (50 cases each)", [](Criterion& c) {
    CounterRng rng(112358);
    // Objective-level shift, scale, reflection.
    for (int rep = 0; rep < 50; ++rep) {
      const std::size_t k = 1 + rng.next_u64() % 3;
      const Sample s(testutil::random_values(rng, 30, -3.0, 3.0));
      const MixtureParams params(
          testutil::random_simplex(rng, k),
          testutil::random_locations(rng, k, -2.0, 2.0, 0.05));
      const double p = rep % 3 == 0 ? 1.0
                       : rep % 3 == 1 ? 2.0
                                      : std::numeric_limits<double>::infinity();
      const double base = dn(s, params, p);

      const double shift_c = -2.0 + 4.0 * rng.uniform01();
      std::vector<double> shifted = s.values();
      for (double& v : shifted) v += shift_c;
      std::vector<double> mu_shift = params.locations;
      for (double& m : mu_shift) m += shift_c;
      c.check(std::abs(dn(Sample(shifted), MixtureParams(params.weights, mu_shift), p) -
                       base) <= 1e-6,
              "objective shift equivariance");

      const double scale = 0.5 + 2.0 * rng.uniform01();
      std::vector<double> scaled = s.values();
      for (double& v : scaled) v *= scale;
      std::vector<double> mu_scale = params.locations;
      for (double& m : mu_scale) m *= scale;
      const double want = std::isinf(p) ? base : std::pow(scale, 1.0 / p) * base;
      c.check(std::abs(dn(Sample(scaled), MixtureParams(params.weights, mu_scale), p) -
                       want) <= 1e-6,
              "objective scale law");

      std::vector<double> negated = s.values();
      for (double& v : negated) v = -v;
      std::vector<double> mu_neg(params.locations.rbegin(), params.locations.rend());
      for (double& m : mu_neg) m = -m;
      std::vector<double> w_rev(params.weights.rbegin(), params.weights.rend());
      c.check(std::abs(dn(Sample(negated), MixtureParams(w_rev, mu_neg), p) - base) <=
                  1e-6,
              "objective reflection equivariance");
    }

    // Fit-level shift and reflection on two-bump samples.
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<double> values;
      const double gap = 2.5 + 2.0 * rng.uniform01();
      const double lambda1 = 0.25 + 0.2 * rng.uniform01();
      for (int i = 0; i < 80; ++i) {
        const double center = rng.uniform01() < lambda1 ? 0.0 : gap;
        values.push_back(center + 0.35 * rng.normal());
      }
      const Sample s(values);
      const FitResult base = fit_k2(s);

      const double c0 = 1.5;  // dyadic shift
      std::vector<double> shifted = s.values();
      for (double& v : shifted) v += c0;
      const FitResult moved = fit_k2(Sample(shifted));
      c.check(std::abs(moved.params.locations[0] - base.params.locations[0] - c0) <= 1e-6,
              "fit shift: mu1");
      c.check(std::abs(moved.params.locations[1] - base.params.locations[1] - c0) <= 1e-6,
              "fit shift: mu2");
      c.check(std::abs(moved.params.weights[0] - base.params.weights[0]) <= 1e-6,
              "fit shift: lambda1");

      std::vector<double> negated = s.values();
      for (double& v : negated) v = -v;
      const FitResult mirrored = fit_k2(Sample(negated));
      c.check(std::abs(mirrored.params.locations[0] + base.params.locations[1]) <= 1e-6,
              "fit reflection: mu1");
      c.check(std::abs(mirrored.params.locations[1] + base.params.locations[0]) <= 1e-6,
              "fit reflection: mu2");
      c.check(std::abs(mirrored.params.weights[0] - (1.0 - base.params.weights[0])) <=
                  1e-6,
              "fit reflection: lambda1");
    }
  });

  const double total =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - suite_start)
          .count();
  std::printf("%s: %d criterion(s) failed (total %.1f s)\n",
              g_failed == 0 ? "OK" : "FAILED", g_failed, total);
  return g_failed == 0 ? 0 : 1;
}
