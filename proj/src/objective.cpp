#include "mixsym/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace mixsym {

namespace {

// Compensated accumulator; the V-statistic sums tens of thousands of
// cancelling terms and must agree with the exact-integration route to 1e-9.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double y = v - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

StepFunction a_single(const Sample& sample, double mu) {
  const auto& x = sample.values();
  const std::size_t n = x.size();
  std::vector<std::pair<double, int>> events;
  events.reserve(2 * n);
  for (double xi : x) events.emplace_back(mu - xi, +1);
  for (double xi : x) events.emplace_back(xi - mu, -1);
  std::sort(events.begin(), events.end());

  std::vector<double> breakpoints(events.size());
  std::vector<double> levels(events.size() + 1);
  levels[0] = 0.0;
  long net = 0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    breakpoints[i] = events[i].first;
    net += events[i].second;
    levels[i + 1] = static_cast<double>(net) / static_cast<double>(n);
  }
  return StepFunction(std::move(breakpoints), std::move(levels));
}

struct GramK2 {
  double g11, g12, g22;
};

GramK2 k2_gram(const Sample& sample, double mu1, double mu2) {
  const StepFunction a1 = a_single(sample, mu1);
  const StepFunction a2 = a_single(sample, mu2);
  return {inner_product(a1, a1), inner_product(a1, a2), inner_product(a2, a2)};
}

constexpr double kDegenerateGram = 1e-14;

}  // namespace

MixtureParams::MixtureParams(std::vector<double> w, std::vector<double> mu)
    : weights(std::move(w)), locations(std::move(mu)) {
  if (weights.empty() || weights.size() != locations.size())
    throw std::invalid_argument("weights and locations must have equal positive length");
  double total = 0.0;
  for (double wi : weights) {
    if (!(wi >= 0.0)) throw std::invalid_argument("negative mixture weight");
    total += wi;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("mixture weights must sum to 1");
  for (std::size_t i = 1; i < locations.size(); ++i)
    if (!(locations[i] > locations[i - 1]))
      throw std::invalid_argument("locations must be strictly increasing");
  for (double m : locations)
    if (!std::isfinite(m)) throw std::invalid_argument("non-finite location");
}

std::vector<StepFunction> a_functions(const Sample& sample,
                                      std::span<const double> locations) {
  for (std::size_t i = 1; i < locations.size(); ++i)
    if (!(locations[i] > locations[i - 1]))
      throw std::invalid_argument("locations must be strictly increasing");
  std::vector<StepFunction> out;
  out.reserve(locations.size());
  for (double mu : locations) out.push_back(a_single(sample, mu));
  return out;
}

StepFunction asymmetry_curve(const Sample& sample, const MixtureParams& params) {
  const auto as = a_functions(sample, params.locations);
  return linear_combination(params.weights, as);
}

double dn(const Sample& sample, const MixtureParams& params, double p) {
  const StepFunction alpha = asymmetry_curve(sample, params);
  if (std::isinf(p) && p > 0) return sup_norm(alpha);
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("invalid p");
  const double integral = lp_integral(alpha, p);
  if (p == 1.0) return integral;
  if (p == 2.0) return std::sqrt(integral);
  return std::pow(integral, 1.0 / p);
}

double dn2_vstat(const Sample& sample, const MixtureParams& params) {
  const auto& x = sample.values();
  const auto& lambda = params.weights;
  const auto& mu = params.locations;
  const std::size_t n = x.size();
  const std::size_t k = params.components();
  KahanSum acc;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double s = x[i] + x[j];
      const double d = x[i] - x[j];
      for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) {
          acc.add(lambda[a] * lambda[b] *
                  (std::abs(s - mu[a] - mu[b]) - std::abs(d - mu[a] + mu[b])));
        }
      }
    }
  }
  return acc.sum / (static_cast<double>(n) * static_cast<double>(n));
}

ProfiledLambda profile_lambda_k2(const Sample& sample, double mu1, double mu2) {
  const GramK2 g = k2_gram(sample, mu1, mu2);
  const double denom = g.g11 - 2.0 * g.g12 + g.g22;  // ||a1 - a2||^2
  if (denom < kDegenerateGram) return {0.5, 0.5, true};
  const double unclamped = -(g.g12 - g.g22) / denom;
  return {std::clamp(unclamped, 0.0, 1.0), unclamped, false};
}

double objective_m(const Sample& sample, double mu1, double mu2) {
  if (mu1 > mu2) std::swap(mu1, mu2);
  const GramK2 g = k2_gram(sample, mu1, mu2);
  const double denom = g.g11 - 2.0 * g.g12 + g.g22;
  if (denom < kDegenerateGram) return g.g11;
  const double lambda = std::clamp(-(g.g12 - g.g22) / denom, 0.0, 1.0);
  // ||lambda a1 + (1-lambda) a2||^2 written on the (a1 - a2, a2) basis.
  return lambda * lambda * denom + 2.0 * lambda * (g.g12 - g.g22) + g.g22;
}

}  // namespace mixsym
