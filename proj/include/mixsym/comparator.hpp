#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mixsym/optimize.hpp"
#include "mixsym/sample.hpp"

namespace mixsym {

// Maximum-likelihood fit of a two-component normal mixture with a common
// variance; the comparison baseline.
struct NormalMixFit {
  double lambda1 = 0.5;
  std::array<double, 2> mu{0.0, 0.0};  // mu[0] < mu[1] after relabeling
  double sigma2 = 1.0;
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> loglik_trace;  // nondecreasing along the EM run
};

struct EmStart {
  double lambda1 = 0.5;
  std::array<double, 2> mu{0.0, 0.0};
  double sigma2 = 1.0;
};

// One EM run from an explicit start.  E-step posterior responsibilities,
// M-step weighted means and pooled common variance; stops when the
// log-likelihood improves by less than tol or at max_iter.
NormalMixFit em_single_start(const Sample& sample, const EmStart& start,
                             int max_iter = 1000, double tol = 1e-9);

// The baseline protocol: lambda1 = 0.5 and sigma2 = half the sample
// variance at every start, locations from the ten quantile pairs (or the
// caller's starts); highest log-likelihood wins.  Runs that collapse a
// component (fewer than 2 effective points, or lambda1 within 1e-6 of
// {0, 1}) are discarded; throws std::runtime_error if every start
// degenerates.  Requires n >= 3.
NormalMixFit em_fit_normal2(const Sample& sample, const FitOptions& opts = {},
                            int max_iter = 1000, double tol = 1e-9);

// An estimator under bootstrap: maps a resample to a parameter vector in a
// fixed order, or nullopt when the refit fails or degenerates.
using BootstrapFitter =
    std::function<std::optional<std::vector<double>>(const Sample&)>;

struct BootstrapReport {
  int B = 0;
  std::vector<std::string> param_names;
  std::vector<double> point;  // estimate on the original sample
  std::vector<double> se;     // SDs over converged resamples
  int failures = 0;
};

// B nonparametric resamples with per-resample substream seed
// (seed XOR resample index); each refit runs the fitter from scratch and
// contributes after canonical relabeling inside the fitter.  Throws
// std::runtime_error when more than half the resamples fail.
BootstrapReport bootstrap_se(const Sample& sample, const BootstrapFitter& fitter,
                             std::vector<std::string> param_names, int B,
                             std::uint64_t seed);

// Standard fitters producing (mu1, mu2, lambda1, sigma2).
BootstrapFitter make_sp_fitter(const FitOptions& opts = {});
BootstrapFitter make_nmle_fitter(const FitOptions& opts = {});

}  // namespace mixsym
