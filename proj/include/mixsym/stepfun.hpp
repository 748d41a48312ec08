#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "mixsym/sample.hpp"

namespace mixsym {

// A right-continuous piecewise-constant real function.  levels() has one
// more entry than breakpoints(): levels()[i] is the value on
// [breakpoints()[i-1], breakpoints()[i]), levels().front() the value left of
// every breakpoint and levels().back() the value from the last breakpoint on.
//
// Construction canonicalizes the representation: breakpoints closer than
// 1e-12 * max(1, |t|) are merged (the rightmost level of a merged cluster
// survives) and breakpoints across which the level does not change are
// dropped.  This keeps the exact sweep algorithms below well defined when
// abscissae like mu_j - x_i collide in floating point.
class StepFunction {
 public:
  // The zero function.
  StepFunction() : levels_{0.0} {}

  StepFunction(std::vector<double> breakpoints, std::vector<double> levels);

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& levels() const { return levels_; }

  // Right-continuous evaluation; provided for tests and probing, the
  // distance computations never sample on a grid.
  double operator()(double t) const;
  double left_limit(double t) const;

  bool operator==(const StepFunction&) const = default;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> levels_;
};

// Empirical CDF with jumps of multiplicity/n at each distinct value.
// Throws std::invalid_argument on an empty value set.
StepFunction ecdf(const Sample& sample);

enum class ReflectRole {
  // g(t) = 1 - f((-t)^-): the CDF of -X when f is the CDF of X.
  cdf,
  // g(t) = f(-t) up to the (integral-irrelevant) values at jump points.
  mirror,
};

StepFunction reflect(const StepFunction& f, ReflectRole role);

// g(t) = f(t - c).
StepFunction shift(const StepFunction& f, double c);

// Pointwise sum of coeffs[i] * fs[i]; the breakpoint set is the merged
// union.  Throws on a length mismatch or empty input.
StepFunction linear_combination(std::span<const double> coeffs,
                                std::span<const StepFunction> fs);

// Integral of |f|^p, exact for every finite p >= 1 since f is piecewise
// constant.  Requires both tail levels to vanish; throws
// std::invalid_argument("non-integrable step function") otherwise.
double lp_integral(const StepFunction& f, double p);

// max_t |f(t)|, attained on some interval or at a jump.
double sup_norm(const StepFunction& f);

// Integral of f * g via an exact sweep over the merged breakpoints.
// Both inputs must have vanishing tails.
double inner_product(const StepFunction& f, const StepFunction& g);

// Two-column CSV (t, post-jump level), one row per breakpoint; the format
// used to export curves for external plotting.
void write_csv(const StepFunction& f, std::ostream& out);
std::string to_csv(const StepFunction& f);

}  // namespace mixsym
