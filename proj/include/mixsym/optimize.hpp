#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mixsym/objective.hpp"
#include "mixsym/sample.hpp"
#include "mixsym/stepfun.hpp"

namespace mixsym {

struct FitOptions {
  // Explicit location starting points (each of length k); empty means the
  // quantile-pair protocol built from {0.05, 0.2, 0.5, 0.8, 0.95}.
  std::vector<std::vector<double>> starts;
  int max_iterations = 500;  // per start
  double tolerance = 1e-8;   // on simplex diameter and objective spread
  double p = 2.0;            // distance exponent; infinity() for sup norm
  std::uint64_t seed = 0;    // reserved for randomized restarts
};

struct StartDiagnostics {
  std::vector<double> start;  // location start point
  bool converged = false;
  int iterations = 0;
  double objective = 0.0;  // d_n reached from this start
};

struct FitResult {
  MixtureParams params;
  double objective;  // d_n at the optimum
  std::vector<StartDiagnostics> per_start;
  std::optional<double> sigma2;
  std::optional<StepFunction> g0;
  std::vector<std::string> warnings;
};

struct NelderMeadResult {
  std::vector<double> argmin;
  double value;
  int iterations;
  bool converged;
};

// Standard simplex search: reflection 1, expansion 2, contraction 1/2,
// shrink 1/2.  The initial simplex perturbs each coordinate of the start by
// max(0.05 * (max_i start_i - min_i start_i), 0.1), a step that is invariant
// under shifting or mirroring the problem.  Terminates when the simplex
// diameter and the objective spread have both dropped below opts.tolerance,
// or at opts.max_iterations.
// Non-finite objective values mid-run are treated as +infinity; a non-finite
// value at the start itself throws.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::span<const double> start, const FitOptions& opts);

// The k=1, p=2 estimator: the weighted median of all n^2 ordered-pair
// averages (x_i + x_j)/2 (diagonal pairs once, off-diagonal twice), the
// midpoint of the median interval when there is one.  Exact, no iteration.
double fit_k1(const Sample& sample);

// The k=2, p=2 estimator: Nelder-Mead on the profiled objective m from each
// of the ten quantile-pair starts, lowest objective wins (protocol-order
// tie-break), weight recovered by the closed-form profile at the winning
// locations, sigma2 filled in from the moment identity.
FitResult fit_k2(const Sample& sample, const FitOptions& opts = {});

// Minimizes d_n(., ., p) over the ordered simplex for k in {1, 2, 3} via
// multi-start Nelder-Mead on free coordinates (stick-breaking logistic map
// for the weights, unconstrained locations sorted on evaluation).
// Delegates to fit_k1 / fit_k2 when k and p match their special cases.
FitResult fit_general(const Sample& sample, int k, const FitOptions& opts = {});

// The ten (q1, q2) location starts of the multi-start protocol,
// q1 < q2 drawn from {0.05, 0.2, 0.5, 0.8, 0.95}; shared with the
// normal-mixture baseline.
std::vector<std::array<double, 2>> quantile_pair_starts(const Sample& sample);

}  // namespace mixsym
