#include "mixsym/comparator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "mixsym/rng.hpp"

namespace mixsym {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool degenerate_fit(const NormalMixFit& fit, std::size_t n) {
  if (!std::isfinite(fit.sigma2) || fit.sigma2 <= 0.0) return true;
  if (fit.lambda1 < 1e-6 || fit.lambda1 > 1.0 - 1e-6) return true;
  const double n1 = fit.lambda1 * static_cast<double>(n);
  return n1 < 2.0 || static_cast<double>(n) - n1 < 2.0;
}

}  // namespace

NormalMixFit em_single_start(const Sample& sample, const EmStart& start,
                             int max_iter, double tol) {
  if (sample.size() < 3) throw std::invalid_argument("em_single_start needs n >= 3");
  if (!(start.sigma2 > 0.0)) throw std::invalid_argument("start sigma2 must be positive");
  const auto& x = sample.values();
  const double n = static_cast<double>(x.size());

  NormalMixFit fit;
  fit.lambda1 = start.lambda1;
  fit.mu = start.mu;
  fit.sigma2 = start.sigma2;
  fit.loglik = -kInf;

  std::vector<double> resp(x.size());
  for (int it = 1; it <= max_iter; ++it) {
    // E-step in log space; heavy-tailed samples overflow the plain density.
    const double log_l1 = std::log(fit.lambda1);
    const double log_l2 = std::log1p(-fit.lambda1);
    double loglik = -0.5 * n * std::log(2.0 * std::numbers::pi * fit.sigma2);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d1 = x[i] - fit.mu[0];
      const double d2 = x[i] - fit.mu[1];
      const double a1 = log_l1 - d1 * d1 / (2.0 * fit.sigma2);
      const double a2 = log_l2 - d2 * d2 / (2.0 * fit.sigma2);
      const double top = std::max(a1, a2);
      loglik += top + std::log(std::exp(a1 - top) + std::exp(a2 - top));
      resp[i] = 1.0 / (1.0 + std::exp(a2 - a1));
    }
    fit.loglik_trace.push_back(loglik);
    fit.iterations = it;
    if (loglik - fit.loglik < tol && it > 1) {
      fit.loglik = loglik;
      fit.converged = true;
      break;
    }
    fit.loglik = loglik;

    // M-step: weighted means, pooled common variance.
    double s1 = 0.0, sx1 = 0.0, sx2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      s1 += resp[i];
      sx1 += resp[i] * x[i];
      sx2 += (1.0 - resp[i]) * x[i];
    }
    const double s2 = n - s1;
    if (s1 <= 0.0 || s2 <= 0.0) break;
    fit.lambda1 = s1 / n;
    fit.mu = {sx1 / s1, sx2 / s2};
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d1 = x[i] - fit.mu[0];
      const double d2 = x[i] - fit.mu[1];
      ss += resp[i] * d1 * d1 + (1.0 - resp[i]) * d2 * d2;
    }
    fit.sigma2 = ss / n;
    if (!(fit.sigma2 > 0.0)) break;
  }

  if (fit.mu[0] > fit.mu[1]) {
    std::swap(fit.mu[0], fit.mu[1]);
    fit.lambda1 = 1.0 - fit.lambda1;
  }
  return fit;
}

NormalMixFit em_fit_normal2(const Sample& sample, const FitOptions& opts,
                            int max_iter, double tol) {
  if (sample.size() < 3) throw std::invalid_argument("em_fit_normal2 needs n >= 3");
  std::vector<std::vector<double>> starts = opts.starts;
  if (starts.empty()) {
    for (const auto& pair : quantile_pair_starts(sample))
      starts.push_back({pair[0], pair[1]});
  }
  const double half_variance = sample.variance() / 2.0;

  bool have_best = false;
  NormalMixFit best;
  for (const auto& s : starts) {
    if (s.size() != 2) throw std::invalid_argument("k=2 start must have 2 locations");
    EmStart seed{0.5, {s[0], s[1]}, half_variance};
    NormalMixFit fit = em_single_start(sample, seed, max_iter, tol);
    if (degenerate_fit(fit, sample.size())) continue;
    if (!have_best || fit.loglik > best.loglik) {
      best = std::move(fit);
      have_best = true;
    }
  }
  if (!have_best) throw std::runtime_error("em_fit_normal2: all starts degenerate");
  return best;
}

BootstrapReport bootstrap_se(const Sample& sample, const BootstrapFitter& fitter,
                             std::vector<std::string> param_names, int B,
                             std::uint64_t seed) {
  if (B < 2) throw std::invalid_argument("bootstrap needs B >= 2");
  const auto point = fitter(sample);
  if (!point) throw std::runtime_error("bootstrap: fitter failed on the original sample");
  const std::size_t dim = point->size();
  if (dim != param_names.size())
    throw std::invalid_argument("parameter name count mismatch");

  const auto& x = sample.values();
  const std::size_t n = x.size();
  std::vector<std::vector<double>> draws;
  draws.reserve(static_cast<std::size_t>(B));
  int failures = 0;
  for (int b = 0; b < B; ++b) {
    CounterRng rng(seed ^ static_cast<std::uint64_t>(b));
    std::vector<double> resampled(n);
    for (std::size_t i = 0; i < n; ++i) resampled[i] = x[rng.uniform_index(n)];
    std::optional<std::vector<double>> refit;
    try {
      refit = fitter(Sample(std::move(resampled), sample.label()));
    } catch (const std::exception&) {
      refit = std::nullopt;
    }
    if (refit && refit->size() == dim)
      draws.push_back(std::move(*refit));
    else
      ++failures;
  }
  if (2 * failures > B)
    throw std::runtime_error("bootstrap: fitter failed on " + std::to_string(failures) +
                             " of " + std::to_string(B) + " resamples");
  if (draws.size() < 2) throw std::runtime_error("bootstrap: fewer than 2 converged resamples");

  BootstrapReport report;
  report.B = B;
  report.param_names = std::move(param_names);
  report.point = *point;
  report.failures = failures;
  report.se.resize(dim, 0.0);
  const double count = static_cast<double>(draws.size());
  for (std::size_t j = 0; j < dim; ++j) {
    double mean = 0.0;
    for (const auto& row : draws) mean += row[j];
    mean /= count;
    double ss = 0.0;
    for (const auto& row : draws) ss += (row[j] - mean) * (row[j] - mean);
    report.se[j] = std::sqrt(ss / (count - 1.0));
  }
  return report;
}

BootstrapFitter make_sp_fitter(const FitOptions& opts) {
  return [opts](const Sample& s) -> std::optional<std::vector<double>> {
    try {
      const FitResult fit = fit_k2(s, opts);
      const double lambda1 = fit.params.weights[0];
      if (lambda1 < 1e-6 || lambda1 > 1.0 - 1e-6) return std::nullopt;
      return std::vector<double>{fit.params.locations[0], fit.params.locations[1],
                                 lambda1, fit.sigma2.value()};
    } catch (const std::exception&) {
      return std::nullopt;
    }
  };
}

BootstrapFitter make_nmle_fitter(const FitOptions& opts) {
  return [opts](const Sample& s) -> std::optional<std::vector<double>> {
    try {
      const NormalMixFit fit = em_fit_normal2(s, opts);
      return std::vector<double>{fit.mu[0], fit.mu[1], fit.lambda1, fit.sigma2};
    } catch (const std::exception&) {
      return std::nullopt;
    }
  };
}

}  // namespace mixsym
