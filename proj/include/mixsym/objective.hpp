#pragma once

#include <span>
#include <vector>

#include "mixsym/sample.hpp"
#include "mixsym/stepfun.hpp"

namespace mixsym {

// A point of the ordered parameter space: weights on the probability
// simplex, locations strictly increasing.
struct MixtureParams {
  std::vector<double> weights;
  std::vector<double> locations;

  // Validates the simplex constraint (sum within 1e-12 of 1, entries >= 0)
  // and the strict ordering of the locations.
  MixtureParams(std::vector<double> weights, std::vector<double> locations);

  std::size_t components() const { return weights.size(); }
};

// The per-location asymmetry indicators a_j(t) =
// (1/n) sum_i I{mu_j - x_i <= t} - (1/n) sum_i I{x_i - mu_j <= t},
// one step function per location, each with vanishing tails and at most
// 2n breakpoints.  Locations must be strictly increasing.
std::vector<StepFunction> a_functions(const Sample& sample,
                                      std::span<const double> locations);

// sum_j lambda_j * a_j, the deconvolved-asymmetry curve whose L_p size the
// estimator minimizes.
StepFunction asymmetry_curve(const Sample& sample, const MixtureParams& params);

// The asymmetry distance d_n(lambda, mu) for p in [1, infinity]; pass
// std::numeric_limits<double>::infinity() for the sup-norm form.  Exact
// (no grid) for every p.
double dn(const Sample& sample, const MixtureParams& params, double p);

// {d_n}^2 as the O(n^2 k^2) double-sum
//   (1/n^2) sum_{i,j} sum_{a,b} lambda_a lambda_b
//       (|x_i+x_j-mu_a-mu_b| - |x_i-x_j-mu_a+mu_b|).
// Must agree with dn(.,.,2)^2; kept as an independent cross-check of the
// exact-integration route, not as the hot path.
double dn2_vstat(const Sample& sample, const MixtureParams& params);

struct ProfiledLambda {
  double lambda1;    // closed-form minimizer clamped to [0, 1]
  double unclamped;  // raw quadratic minimizer, for diagnostics
  bool degenerate;   // ||a1 - a2||^2 below tolerance; lambda1 reported as 1/2
};

// Closed-form profile of the k=2 weight at fixed locations:
// lambda1 = -<a1 - a2, a2> / ||a1 - a2||^2, clamped to the simplex.
ProfiledLambda profile_lambda_k2(const Sample& sample, double mu1, double mu2);

// The profiled k=2 objective m(mu1, mu2) = ||lambda1 a1 + (1-lambda1) a2||^2
// evaluated at the clamped profile weight; equals
// (||a1||^2 ||a2||^2 - <a1,a2>^2) / ||a1 - a2||^2 while the unclamped
// minimizer stays inside [0, 1].  Accepts unordered locations (the value is
// order-invariant); returns ||a1||^2 in the degenerate mu1 = mu2 limit.
double objective_m(const Sample& sample, double mu1, double mu2);

}  // namespace mixsym
