#include "mixsym/deconvolve.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace mixsym {

double sigma2_hat(const Sample& sample, const MixtureParams& params) {
  if (sample.size() < 2) throw std::invalid_argument("sigma2_hat needs n >= 2");
  const auto& lambda = params.weights;
  const auto& mu = params.locations;
  double mu_bar = 0.0;
  for (std::size_t j = 0; j < params.components(); ++j) mu_bar += lambda[j] * mu[j];
  double between = 0.0;
  for (std::size_t j = 0; j < params.components(); ++j)
    between += lambda[j] * (mu[j] - mu_bar) * (mu[j] - mu_bar);
  return sample.variance() - between;
}

DeconvolutionResult estimate_g0(const Sample& sample, const MixtureParams& params) {
  if (params.components() != 2)
    throw std::invalid_argument("estimate_g0 is defined for k = 2 only");
  const double lambda1 = params.weights[0];
  const double lambda2 = params.weights[1];
  if (std::abs(lambda1 - 0.5) <= 1e-6)
    throw SingularMixingError("non-invertible mixing matrix (lambda1 near 1/2)");

  const StepFunction fn = ecdf(sample);
  const StepFunction fn_reflected = reflect(fn, ReflectRole::cdf);
  const double mu1 = params.locations[0];
  const double mu2 = params.locations[1];

  // G0(z) = {l1 [Fn^-(z - m1) + Fn(z + m1)] - l2 [Fn^-(z - m2) + Fn(z + m2)]}
  //         / {2 (l1 - l2)}
  const double denom = 2.0 * (lambda1 - lambda2);
  const std::array<double, 4> coeffs = {lambda1 / denom, lambda1 / denom,
                                        -lambda2 / denom, -lambda2 / denom};
  const std::array<StepFunction, 4> terms = {
      shift(fn_reflected, mu1), shift(fn, -mu1),
      shift(fn_reflected, mu2), shift(fn, -mu2)};
  StepFunction g0 = linear_combination(coeffs, terms);

  // The tail levels are 0 and 2(l1 - l2)/denom algebraically; pin them so
  // downstream code can rely on exact CDF limits.
  std::vector<double> levels = g0.levels();
  if (std::abs(levels.front()) > 1e-12 || std::abs(levels.back() - 1.0) > 1e-12)
    throw std::logic_error("estimate_g0: tail levels drifted");
  levels.front() = 0.0;
  levels.back() = 1.0;
  g0 = StepFunction(g0.breakpoints(), std::move(levels));

  double violation = 0.0;
  for (std::size_t i = 1; i < g0.levels().size(); ++i)
    violation = std::max(violation, g0.levels()[i - 1] - g0.levels()[i]);

  DeconvolutionResult result;
  result.g0 = std::move(g0);
  result.sigma2 = sigma2_hat(sample, params);
  result.monotone_violation = violation;
  return result;
}

StepFunction isotonize(const StepFunction& f) {
  std::vector<double> levels = f.levels();
  double running = levels.front();
  for (double& level : levels) {
    running = std::max(running, level);
    level = std::clamp(running, 0.0, 1.0);
  }
  return StepFunction(f.breakpoints(), std::move(levels));
}

}  // namespace mixsym
