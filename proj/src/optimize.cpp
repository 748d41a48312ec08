#include "mixsym/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "mixsym/deconvolve.hpp"
#include "mixsym/identifiability.hpp"

namespace mixsym {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieBreak = 1e-12;  // earlier start wins within this margin
constexpr int kMaxRestartRounds = 8;

// A single simplex can collapse along a flat valley before reaching its
// bottom; restarting from the collapsed point with a re-inflated simplex is
// the standard fix and keeps the argmin reproducible to well below the
// equivariance tolerances.
NelderMeadResult restarted_nelder_mead(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> start, const FitOptions& opts) {
  NelderMeadResult best = nelder_mead(f, start, opts);
  int total_iterations = best.iterations;
  for (int round = 1; round < kMaxRestartRounds; ++round) {
    NelderMeadResult next = nelder_mead(f, best.argmin, opts);
    total_iterations += next.iterations;
    const bool improved = next.value < best.value - kTieBreak;
    if (next.value <= best.value) best = std::move(next);
    if (!improved) break;
  }
  best.iterations = total_iterations;
  return best;
}

double finite_or_inf(double v) { return std::isfinite(v) ? v : kInf; }

// d_n for free (possibly unsorted or coinciding) locations: sorts the
// location/weight pairs and merges coincident locations so the distance is
// defined on the closure of the ordered simplex.
double dn_free(const Sample& sample, std::vector<double> weights,
               std::vector<double> locations, double p) {
  const std::size_t k = weights.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return locations[a] < locations[b];
  });
  std::vector<double> mu, lam;
  mu.reserve(k);
  lam.reserve(k);
  for (std::size_t idx : order) {
    const double m = locations[idx];
    if (!mu.empty() && m - mu.back() <= 1e-12 * std::max(1.0, std::abs(m))) {
      lam.back() += weights[idx];
    } else {
      mu.push_back(m);
      lam.push_back(weights[idx]);
    }
  }
  return dn(sample, MixtureParams(std::move(lam), std::move(mu)), p);
}

// Stick-breaking logistic map from k-1 free coordinates onto the simplex.
std::vector<double> simplex_from_free(std::span<const double> z) {
  std::vector<double> w(z.size() + 1);
  double remaining = 1.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double v = 1.0 / (1.0 + std::exp(-z[i]));
    w[i] = remaining * v;
    remaining *= 1.0 - v;
  }
  w.back() = remaining;
  return w;
}

std::vector<double> free_coords_for_uniform_weights(std::size_t k) {
  // Chosen so the stick-breaking map yields weights 1/k each.
  std::vector<double> z(k - 1);
  for (std::size_t i = 0; i + 1 < k; ++i) {
    const double v = 1.0 / static_cast<double>(k - i);
    z[i] = std::log(v / (1.0 - v));
  }
  return z;
}

// All increasing k-tuples from the protocol quantile set, in lexicographic
// (protocol) order.
std::vector<std::vector<double>> quantile_tuple_starts(const Sample& sample,
                                                       std::size_t k) {
  static constexpr double kLevels[] = {0.05, 0.2, 0.5, 0.8, 0.95};
  std::vector<std::vector<double>> starts;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    std::vector<double> s(k);
    for (std::size_t i = 0; i < k; ++i) s[i] = sample.quantile(kLevels[idx[i]]);
    starts.push_back(std::move(s));
    // next combination
    std::size_t i = k;
    while (i > 0) {
      --i;
      if (idx[i] + (k - i) < 5) {
        ++idx[i];
        for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
        break;
      }
      if (i == 0) return starts;
    }
  }
}

// Ensures strictly increasing locations for the result params, nudging
// collapsed components apart rather than refusing the fit.
bool separate_collapsed(std::vector<double>& mu) {
  bool nudged = false;
  for (std::size_t i = 1; i < mu.size(); ++i) {
    const double floor_gap = 1e-9 * std::max(1.0, std::abs(mu[i - 1]));
    if (mu[i] <= mu[i - 1] + floor_gap) {
      mu[i] = mu[i - 1] + 2.0 * floor_gap;
      nudged = true;
    }
  }
  return nudged;
}

// Distance at which an estimated weight counts as "near" an excluded value.
// The exact-set tolerances (1e-9) are meaningless for estimates whose
// sampling error is orders of magnitude larger; this matches the scale of
// the bootstrap SEs on the bundled dataset.
constexpr double kEstimateBoundaryBand = 0.02;

void attach_advisories(const Sample& sample, FitResult& result) {
  result.sigma2 = sigma2_hat(sample, result.params);
  if (*result.sigma2 < 0.0)
    result.warnings.push_back("negative sigma2 estimate (model misspecification signal)");
  const IdentifiabilityVerdict verdict = check_identifiability(result.params);
  if (!verdict.member && verdict.reason != IdentReason::unsupported_k)
    result.warnings.push_back(std::string("parameters outside the identifiable set: ") +
                              to_string(verdict.reason));
  for (const auto& w : verdict.warnings) result.warnings.push_back(w);
  if (result.params.components() == 2) {
    const double lambda1 = result.params.weights[0];
    for (double excluded : {0.0, 0.5, 1.0}) {
      if (std::abs(lambda1 - excluded) <= kEstimateBoundaryBand) {
        result.warnings.push_back(
            "estimated lambda1 near the non-identifiable boundary; "
            "deconvolution may be unreliable");
        break;
      }
    }
  }
}

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::span<const double> start, const FitOptions& opts) {
  const std::size_t d = start.size();
  if (d == 0) throw std::invalid_argument("nelder_mead needs dimension >= 1");
  if (opts.max_iterations < 1) throw std::invalid_argument("max_iterations < 1");
  if (!(opts.tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");

  const double f_start = f(start);
  if (!std::isfinite(f_start))
    throw std::invalid_argument("objective non-finite at start");

  // The perturbation depends on the start only through its coordinate
  // spread, so shifting or mirroring a problem leaves the initial simplex
  // geometry unchanged; a |start_i|-proportional rule would make the
  // multi-start protocol land in different local basins after a shift.
  const auto [min_it, max_it] = std::minmax_element(start.begin(), start.end());
  const double step = std::max(0.05 * (*max_it - *min_it), 0.1);
  std::vector<std::vector<double>> x(d + 1, std::vector<double>(start.begin(), start.end()));
  for (std::size_t i = 0; i < d; ++i) x[i + 1][i] += step;
  std::vector<double> fx(d + 1);
  fx[0] = f_start;
  for (std::size_t i = 1; i <= d; ++i) fx[i] = finite_or_inf(f(x[i]));

  std::vector<std::size_t> order(d + 1);
  int iterations = 0;
  bool converged = false;

  auto sort_order = [&]() {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
  };

  for (; iterations < opts.max_iterations; ++iterations) {
    sort_order();
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[d == 0 ? 0 : d - 1];

    double diameter = 0.0;
    for (std::size_t v = 0; v <= d; ++v)
      for (std::size_t c = 0; c < d; ++c)
        diameter = std::max(diameter, std::abs(x[v][c] - x[best][c]));
    const double spread = fx[worst] - fx[best];
    if (diameter < opts.tolerance && spread < opts.tolerance) {
      converged = true;
      break;
    }

    std::vector<double> centroid(d, 0.0);
    for (std::size_t v = 0; v <= d; ++v) {
      if (v == worst) continue;
      for (std::size_t c = 0; c < d; ++c) centroid[c] += x[v][c];
    }
    for (double& c : centroid) c /= static_cast<double>(d);

    auto point_along = [&](double step) {
      std::vector<double> p(d);
      for (std::size_t c = 0; c < d; ++c)
        p[c] = centroid[c] + step * (centroid[c] - x[worst][c]);
      return p;
    };

    std::vector<double> reflected = point_along(1.0);
    const double f_reflected = finite_or_inf(f(reflected));

    bool shrink = false;
    if (f_reflected < fx[best]) {
      std::vector<double> expanded = point_along(2.0);
      const double f_expanded = finite_or_inf(f(expanded));
      if (f_expanded < f_reflected) {
        x[worst] = std::move(expanded);
        fx[worst] = f_expanded;
      } else {
        x[worst] = std::move(reflected);
        fx[worst] = f_reflected;
      }
    } else if (f_reflected < fx[second_worst]) {
      x[worst] = std::move(reflected);
      fx[worst] = f_reflected;
    } else if (f_reflected < fx[worst]) {
      std::vector<double> contracted = point_along(0.5);  // outside
      const double f_contracted = finite_or_inf(f(contracted));
      if (f_contracted <= f_reflected) {
        x[worst] = std::move(contracted);
        fx[worst] = f_contracted;
      } else {
        shrink = true;
      }
    } else {
      std::vector<double> contracted = point_along(-0.5);  // inside
      const double f_contracted = finite_or_inf(f(contracted));
      if (f_contracted < fx[worst]) {
        x[worst] = std::move(contracted);
        fx[worst] = f_contracted;
      } else {
        shrink = true;
      }
    }

    if (shrink) {
      for (std::size_t v = 0; v <= d; ++v) {
        if (v == best) continue;
        for (std::size_t c = 0; c < d; ++c)
          x[v][c] = x[best][c] + 0.5 * (x[v][c] - x[best][c]);
        fx[v] = finite_or_inf(f(x[v]));
      }
    }
  }

  sort_order();
  return {x[order.front()], fx[order.front()], iterations, converged};
}

double fit_k1(const Sample& sample) {
  const auto& x = sample.values();
  const std::size_t n = x.size();
  std::vector<double> means;
  means.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) means.push_back(0.5 * (x[i] + x[j]));
  std::sort(means.begin(), means.end());
  const std::size_t total = means.size();
  if (total % 2 == 1) return means[total / 2];
  return 0.5 * (means[total / 2 - 1] + means[total / 2]);
}

std::vector<std::array<double, 2>> quantile_pair_starts(const Sample& sample) {
  const auto tuples = quantile_tuple_starts(sample, 2);
  std::vector<std::array<double, 2>> out;
  out.reserve(tuples.size());
  for (const auto& t : tuples) out.push_back({t[0], t[1]});
  return out;
}

namespace {

struct ProtocolOutcome {
  double value = kInf;            // minimized objective (m for k=2, d_n otherwise)
  std::vector<double> argmin;     // free coordinates of the winner
  std::vector<StartDiagnostics> diagnostics;
};

// Multi-start minimization in one orientation: lowest objective wins,
// earlier start kept within the tie margin.
ProtocolOutcome run_start_protocol(
    const std::function<double(std::span<const double>)>& objective,
    const std::vector<std::vector<double>>& starts,
    const std::vector<double>& start_prefix, const FitOptions& opts,
    bool report_dn_scale) {
  ProtocolOutcome out;
  out.diagnostics.reserve(starts.size());
  for (const auto& s : starts) {
    std::vector<double> z0 = start_prefix;
    z0.insert(z0.end(), s.begin(), s.end());
    const NelderMeadResult r = restarted_nelder_mead(objective, z0, opts);
    const double reported =
        report_dn_scale ? std::sqrt(std::max(0.0, r.value)) : r.value;
    out.diagnostics.push_back({s, r.converged, r.iterations, reported});
    if (r.value < out.value - kTieBreak) {
      out.value = r.value;
      out.argmin = r.argmin;
    }
  }
  return out;
}

// Negated copies, order-reversed so each start stays increasing.
std::vector<std::vector<double>> mirror_starts(
    const std::vector<std::vector<double>>& starts) {
  std::vector<std::vector<double>> out;
  out.reserve(starts.size());
  for (const auto& s : starts) {
    std::vector<double> m(s.rbegin(), s.rend());
    for (double& v : m) v = -v;
    out.push_back(std::move(m));
  }
  return out;
}

Sample mirror_sample(const Sample& sample) {
  std::vector<double> negated = sample.values();
  for (double& v : negated) v = -v;
  return Sample(std::move(negated), sample.label());
}

// +1 when the sorted values precede their mirror image lexicographically,
// -1 for the opposite, 0 for an exactly symmetric sample.  Used only to
// break exact objective ties between the two orientations.
int sample_orientation(const Sample& sample) {
  const auto& x = sample.values();
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double mirrored = -x[n - 1 - i];
    if (x[i] < mirrored) return +1;
    if (x[i] > mirrored) return -1;
  }
  return 0;
}

}  // namespace

// The start protocol runs on both orientations of the sample and the better
// minimum wins.  The piecewise-smooth objective has many micro-minima along
// its valleys, and a single-orientation search returns a point that depends
// on which side the simplex happened to approach from; pairing the runs
// makes fitting -x return exactly the mirrored parameters.
FitResult fit_k2(const Sample& sample, const FitOptions& opts) {
  if (sample.size() < 2) throw std::invalid_argument("fit_k2 needs n >= 2");

  for (const auto& s : opts.starts)
    if (s.size() != 2) throw std::invalid_argument("k=2 start must have 2 locations");

  const Sample mirrored = mirror_sample(sample);
  const std::vector<std::vector<double>> starts =
      opts.starts.empty() ? quantile_tuple_starts(sample, 2) : opts.starts;
  const std::vector<std::vector<double>> starts_mirrored =
      opts.starts.empty() ? quantile_tuple_starts(mirrored, 2)
                          : mirror_starts(opts.starts);

  const auto objective = [&](std::span<const double> mu) {
    return objective_m(sample, mu[0], mu[1]);
  };
  const auto objective_mirrored = [&](std::span<const double> mu) {
    return objective_m(mirrored, mu[0], mu[1]);
  };

  ProtocolOutcome forward = run_start_protocol(objective, starts, {}, opts, true);
  ProtocolOutcome backward =
      run_start_protocol(objective_mirrored, starts_mirrored, {}, opts, true);
  if (!std::isfinite(forward.value) && !std::isfinite(backward.value))
    throw std::runtime_error("fit_k2: no start produced a finite objective");

  bool pick_backward;
  if (backward.value < forward.value)
    pick_backward = true;
  else if (forward.value < backward.value)
    pick_backward = false;
  else
    pick_backward = sample_orientation(sample) < 0;

  const ProtocolOutcome& winner = pick_backward ? backward : forward;
  const double best_value = winner.value;
  std::vector<double> best_mu = winner.argmin;
  std::vector<StartDiagnostics> diagnostics = winner.diagnostics;
  if (pick_backward) {
    // Map the mirrored-orientation run back to the original coordinates.
    for (double& m : best_mu) m = -m;
    for (auto& diag : diagnostics) {
      std::vector<double> s(diag.start.rbegin(), diag.start.rend());
      for (double& v : s) v = -v;
      diag.start = std::move(s);
    }
  }

  std::sort(best_mu.begin(), best_mu.end());
  const ProfiledLambda prof = profile_lambda_k2(sample, best_mu[0], best_mu[1]);
  const bool nudged = separate_collapsed(best_mu);

  FitResult result{
      MixtureParams({prof.lambda1, 1.0 - prof.lambda1}, best_mu),
      std::sqrt(std::max(0.0, best_value)),
      std::move(diagnostics),
      std::nullopt,
      std::nullopt,
      {}};
  if (nudged) result.warnings.push_back("degenerate locations separated by a minimal gap");
  attach_advisories(sample, result);
  return result;
}

FitResult fit_general(const Sample& sample, int k, const FitOptions& opts) {
  if (k < 1 || k > 3) throw std::invalid_argument("fit_general supports k in {1, 2, 3}");
  if (sample.size() < static_cast<std::size_t>(k))
    throw std::invalid_argument("fit_general needs n >= k");
  const bool sup = std::isinf(opts.p) && opts.p > 0;
  if (!sup && (!(opts.p >= 1.0) || !std::isfinite(opts.p)))
    throw std::invalid_argument("invalid p");

  if (k == 1 && opts.p == 2.0) {
    const double mu = fit_k1(sample);
    MixtureParams params({1.0}, {mu});
    const double objective = dn(sample, params, 2.0);
    FitResult result{std::move(params),
                     objective,
                     {{{mu}, true, 0, objective}},
                     std::nullopt,
                     std::nullopt,
                     {}};
    attach_advisories(sample, result);
    return result;
  }
  if (k == 2 && opts.p == 2.0) return fit_k2(sample, opts);

  const std::size_t kk = static_cast<std::size_t>(k);
  for (const auto& s : opts.starts)
    if (s.size() != kk) throw std::invalid_argument("start length must equal k");

  const Sample mirrored = mirror_sample(sample);
  const std::vector<std::vector<double>> starts =
      opts.starts.empty() ? quantile_tuple_starts(sample, kk) : opts.starts;
  const std::vector<std::vector<double>> starts_mirrored =
      opts.starts.empty() ? quantile_tuple_starts(mirrored, kk)
                          : mirror_starts(opts.starts);

  // Free coordinates: k-1 stick-breaking weights, then k locations.
  const auto make_objective = [&](const Sample& data) {
    return [&data, kk, &opts](std::span<const double> z) {
      std::vector<double> weights = simplex_from_free(z.subspan(0, kk - 1));
      std::vector<double> locations(z.begin() + (kk - 1), z.end());
      return dn_free(data, std::move(weights), std::move(locations), opts.p);
    };
  };

  const std::vector<double> z_weights = free_coords_for_uniform_weights(kk);
  ProtocolOutcome forward =
      run_start_protocol(make_objective(sample), starts, z_weights, opts, false);
  ProtocolOutcome backward = run_start_protocol(make_objective(mirrored),
                                                starts_mirrored, z_weights, opts, false);
  if (!std::isfinite(forward.value) && !std::isfinite(backward.value))
    throw std::runtime_error("fit_general: no start produced a finite objective");

  bool pick_backward;
  if (backward.value < forward.value)
    pick_backward = true;
  else if (forward.value < backward.value)
    pick_backward = false;
  else
    pick_backward = sample_orientation(sample) < 0;

  const ProtocolOutcome& winner = pick_backward ? backward : forward;
  const double best_value = winner.value;
  std::vector<double> best_z = winner.argmin;
  std::vector<StartDiagnostics> diagnostics = winner.diagnostics;

  std::vector<double> weights = simplex_from_free(
      std::span<const double>(best_z).subspan(0, kk - 1));
  std::vector<double> locations(best_z.begin() + (kk - 1), best_z.end());
  if (pick_backward) {
    for (double& m : locations) m = -m;
    for (auto& diag : diagnostics) {
      std::vector<double> s(diag.start.rbegin(), diag.start.rend());
      for (double& v : s) v = -v;
      diag.start = std::move(s);
    }
  }
  std::vector<std::size_t> order(kk);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return locations[a] < locations[b];
  });
  std::vector<double> mu_sorted, lambda_sorted;
  for (std::size_t idx : order) {
    mu_sorted.push_back(locations[idx]);
    lambda_sorted.push_back(weights[idx]);
  }
  const bool nudged = separate_collapsed(mu_sorted);

  FitResult result{MixtureParams(std::move(lambda_sorted), std::move(mu_sorted)),
                   best_value,
                   std::move(diagnostics),
                   std::nullopt,
                   std::nullopt,
                   {}};
  if (nudged) result.warnings.push_back("degenerate locations separated by a minimal gap");
  attach_advisories(sample, result);
  return result;
}

}  // namespace mixsym
