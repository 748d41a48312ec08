#pragma once

#include <stdexcept>

#include "mixsym/objective.hpp"
#include "mixsym/sample.hpp"
#include "mixsym/stepfun.hpp"

namespace mixsym {

// Thrown when the two-component mixing matrix cannot be inverted
// (lambda1 within 1e-6 of 1/2).
class SingularMixingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DeconvolutionResult {
  StepFunction g0;
  double sigma2 = 0.0;
  // Largest decrease over consecutive levels of g0; 0 for a monotone curve.
  // A visibly positive value signals small-sample noise or misspecification.
  double monotone_violation = 0.0;
};

// Component-variance estimate: sample variance (divisor n-1) minus the
// between-component variance sum_j lambda_j (mu_j - mu_bar)^2.  May come out
// negative on a pathological fit; returned as-is (callers attach a warning).
double sigma2_hat(const Sample& sample, const MixtureParams& params);

// Nonparametric component-CDF estimate for k = 2:
//   G0(z) = {l1 [Fn^-(z - m1) + Fn(z + m1)] - l2 [Fn^-(z - m2) + Fn(z + m2)]}
//           / {2 (l1 - l2)},
// built exactly from shifted and reflected copies of the empirical CDF.
// The curve satisfies G0(z) = 1 - G0(-z) at continuity points and has tail
// levels exactly 0 and 1.  It is reported raw (not monotonized) so the
// monotone_violation diagnostic stays informative.
// Throws std::invalid_argument for k != 2 and SingularMixingError when
// lambda1 is within 1e-6 of 1/2.
DeconvolutionResult estimate_g0(const Sample& sample, const MixtureParams& params);

// Monotone envelope (running maximum clamped to [0, 1]) for plotting only.
StepFunction isotonize(const StepFunction& f);

}  // namespace mixsym
