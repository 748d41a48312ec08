#include "mixsym/identifiability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace mixsym {

namespace {

constexpr double kMemberTol = 1e-9;    // verdict tolerance
constexpr double kProximityTol = 1e-6; // near-boundary warning tolerance
constexpr double kAtomMergeTol = 1e-12;

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

struct Classification {
  IdentReason reason = IdentReason::ok;
  std::optional<CaseWitness> witness;
  std::optional<double> symmetry_center;
};

// Matches one of the four excluded three-point families.  Each test
// eliminates the family's free ratio via r = lambda1/lambda3:
//   gaps (4d, 2d),  lambda ∝ (r^2, r^2-1, r)      =>  l1 l2 = l1^2 - l3^2
//   gaps (2d, 2d),  lambda ∝ (r, r+1, 1)          =>  l2 = l1 + l3
//   gaps (3d, d),   lambda ∝ (r√r, (r-1)√(r+1), √r)
//                                                 =>  (l2/l1)^2 = (r-1)^2 (r+1) / r^3
//   gaps (d, d),    lambda ∝ (r, √(r+r^2), 1)     =>  l2^2 = l1^2 + l1 l3
// In each case d > 0 and r > 1; the reverse orientation (r < 1) is covered
// by testing the reflected parameter point separately.
std::optional<std::pair<IdentReason, CaseWitness>> match_excluded_family(
    const std::vector<double>& l, const std::vector<double>& mu, double tol) {
  const double gap1 = mu[1] - mu[0];
  const double gap2 = mu[2] - mu[1];
  const double r = l[0] / l[2];
  if (!(r > 1.0 + tol)) return std::nullopt;

  if (close_rel(gap1, 2.0 * gap2, tol) &&
      close_rel(l[0] * l[1], l[0] * l[0] - l[2] * l[2], tol))
    return std::make_pair(IdentReason::case_a2, CaseWitness{mu[0], gap2 / 2.0, r});

  if (close_rel(gap1, gap2, tol) && close_rel(l[1], l[0] + l[2], tol))
    return std::make_pair(IdentReason::case_a3,
                          CaseWitness{mu[0] - gap1 / 2.0, gap1 / 2.0, r});

  if (close_rel(gap1, 3.0 * gap2, tol)) {
    const double lhs = (l[1] / l[0]) * (l[1] / l[0]);
    const double rhs = (r - 1.0) * (r - 1.0) * (r + 1.0) / (r * r * r);
    if (close_rel(lhs, rhs, tol))
      return std::make_pair(IdentReason::case_a4, CaseWitness{mu[0], gap2, r});
  }

  if (close_rel(gap1, gap2, tol) &&
      close_rel(l[1] * l[1], l[0] * l[0] + l[0] * l[2], tol))
    return std::make_pair(IdentReason::case_a5,
                          CaseWitness{mu[0] - gap1, gap1, r});

  return std::nullopt;
}

Classification classify_k2(const MixtureParams& params, double tol) {
  const double l1 = params.weights[0];
  if (l1 <= tol || l1 >= 1.0 - tol) return {IdentReason::zero_weight, {}, {}};
  if (std::abs(l1 - 0.5) <= tol) return {IdentReason::lambda_half, {}, {}};
  return {IdentReason::ok, {}, {}};
}

Classification classify_k3(const MixtureParams& params, double tol) {
  const auto& l = params.weights;
  const auto& mu = params.locations;
  if (*std::min_element(l.begin(), l.end()) <= tol)
    return {IdentReason::zero_weight, {}, {}};

  const double gap1 = mu[1] - mu[0];
  const double gap2 = mu[2] - mu[1];
  if (close_rel(l[0], l[2], tol) && close_rel(gap1, gap2, tol))
    return {IdentReason::symmetric, {}, 0.5 * (mu[0] + mu[2])};

  if (auto hit = match_excluded_family(l, mu, tol))
    return {hit->first, hit->second, {}};

  const std::vector<double> l_reflected{l[2], l[1], l[0]};
  const std::vector<double> mu_reflected{-mu[2], -mu[1], -mu[0]};
  if (auto hit = match_excluded_family(l_reflected, mu_reflected, tol))
    return {IdentReason::reflected_case, hit->second, {}};

  return {IdentReason::ok, {}, {}};
}

IdentifiabilityVerdict verdict_from(const MixtureParams& params,
                                    Classification (*classify)(const MixtureParams&,
                                                               double)) {
  const Classification strict = classify(params, kMemberTol);
  IdentifiabilityVerdict v;
  v.member = strict.reason == IdentReason::ok;
  v.reason = strict.reason;
  v.witness = strict.witness;
  v.symmetry_center = strict.symmetry_center;
  const Classification loose = classify(params, kProximityTol);
  if (loose.reason != strict.reason)
    v.warnings.push_back(std::string("within 1e-6 of boundary: ") +
                         to_string(loose.reason));
  return v;
}

}  // namespace

const char* to_string(IdentReason reason) {
  switch (reason) {
    case IdentReason::ok: return "OK";
    case IdentReason::zero_weight: return "ZERO_WEIGHT";
    case IdentReason::symmetric: return "SYMMETRIC";
    case IdentReason::lambda_half: return "LAMBDA_HALF";
    case IdentReason::case_a2: return "CASE_A2";
    case IdentReason::case_a3: return "CASE_A3";
    case IdentReason::case_a4: return "CASE_A4";
    case IdentReason::case_a5: return "CASE_A5";
    case IdentReason::reflected_case: return "REFLECTED_CASE";
    case IdentReason::unsupported_k: return "UNSUPPORTED_K";
  }
  return "UNKNOWN";
}

FinitePointDistribution::FinitePointDistribution(std::vector<double> a,
                                                 std::vector<double> w) {
  if (a.empty() || a.size() != w.size())
    throw std::invalid_argument("atoms and weights must have equal positive length");
  std::vector<std::size_t> order(a.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a[i] < a[j]; });
  double total = 0.0;
  for (std::size_t idx : order) {
    const double atom = a[idx];
    const double weight = w[idx];
    if (!std::isfinite(atom)) throw std::invalid_argument("non-finite atom");
    if (!(weight > 0.0)) throw std::invalid_argument("weights must be positive");
    total += weight;
    if (!atoms.empty() && atom - atoms.back() <= kAtomMergeTol) {
      weights.back() += weight;
    } else {
      atoms.push_back(atom);
      weights.push_back(weight);
    }
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("atom weights must sum to 1");
}

FinitePointDistribution FinitePointDistribution::from_params(
    const MixtureParams& params) {
  return FinitePointDistribution(params.locations, params.weights);
}

FinitePointDistribution FinitePointDistribution::reflected() const {
  std::vector<double> a(atoms.size()), w(weights.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    a[i] = -atoms[atoms.size() - 1 - i];
    w[i] = weights[atoms.size() - 1 - i];
  }
  return FinitePointDistribution(std::move(a), std::move(w));
}

FinitePointDistribution convolve_finite(const FinitePointDistribution& a,
                                        const FinitePointDistribution& b) {
  std::vector<double> atoms, weights;
  atoms.reserve(a.atoms.size() * b.atoms.size());
  weights.reserve(atoms.capacity());
  for (std::size_t i = 0; i < a.atoms.size(); ++i)
    for (std::size_t j = 0; j < b.atoms.size(); ++j) {
      atoms.push_back(a.atoms[i] + b.atoms[j]);
      weights.push_back(a.weights[i] * b.weights[j]);
    }
  return FinitePointDistribution(std::move(atoms), std::move(weights));
}

bool is_zero_symmetric(const FinitePointDistribution& d, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const std::size_t m = d.atoms.size();
  for (std::size_t i = 0; i < (m + 1) / 2; ++i) {
    const std::size_t j = m - 1 - i;
    if (std::abs(d.atoms[i] + d.atoms[j]) > tol) return false;
    if (std::abs(d.weights[i] - d.weights[j]) > tol) return false;
  }
  return true;
}

IdentifiabilityVerdict in_omega2_star(const MixtureParams& params) {
  if (params.components() != 2)
    throw std::invalid_argument("in_omega2_star requires k = 2");
  return verdict_from(params, &classify_k2);
}

bool corollary1_check(const MixtureParams& params) {
  if (params.components() != 3)
    throw std::invalid_argument("corollary1_check requires k = 3");
  for (double w : params.weights)
    if (w <= 1e-9) return false;
  const double ratio = (params.locations[1] - params.locations[0]) /
                       (params.locations[2] - params.locations[1]);
  for (double excluded : {1.0 / 3.0, 0.5, 1.0, 2.0, 3.0})
    if (close_rel(ratio, excluded, 1e-9)) return false;
  return true;
}

IdentifiabilityVerdict in_omega3_star(const MixtureParams& params) {
  if (params.components() != 3)
    throw std::invalid_argument("in_omega3_star requires k = 3");
  return verdict_from(params, &classify_k3);
}

IdentifiabilityVerdict check_identifiability(const MixtureParams& params) {
  switch (params.components()) {
    case 1: {
      IdentifiabilityVerdict v;
      v.member = true;
      v.reason = IdentReason::ok;
      return v;
    }
    case 2: return in_omega2_star(params);
    case 3: return in_omega3_star(params);
    default: {
      IdentifiabilityVerdict v;
      v.member = false;
      v.reason = IdentReason::unsupported_k;
      return v;
    }
  }
}

namespace {

// Approximate positive gcd of a set of gap fractions, tolerant of
// floating-point drift in the inputs.
double approx_gcd(std::vector<double> values) {
  double scale = 0.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  const double eps = 1e-9 * std::max(1.0, scale);
  double g = 0.0;
  for (double v : values) {
    double a = std::abs(v);
    double b = g;
    while (a > eps) {
      const double r = std::fmod(b, a);
      b = a;
      a = (r < eps || a - r < eps) ? 0.0 : r;
    }
    g = b;
  }
  return g;
}

std::vector<std::vector<double>> weight_mesh(int divisions, int m) {
  std::vector<std::vector<double>> mesh;
  const double unit = 1.0 / static_cast<double>(divisions);
  if (m == 1) {
    mesh.push_back({1.0});
  } else if (m == 2) {
    for (int c1 = 1; c1 < divisions; ++c1)
      mesh.push_back({c1 * unit, (divisions - c1) * unit});
  } else {
    for (int c1 = 1; c1 + 2 <= divisions; ++c1)
      for (int c2 = 1; c1 + c2 + 1 <= divisions; ++c2)
        mesh.push_back({c1 * unit, c2 * unit, (divisions - c1 - c2) * unit});
  }
  return mesh;
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

}  // namespace

std::vector<FinitePointDistribution> brute_force_symmetrizer(
    const FinitePointDistribution& d, int m, const SymmetrizerGrid& grid) {
  if (d.atoms.size() > 4)
    throw std::invalid_argument("brute_force_symmetrizer: input must have <= 4 atoms");
  if (m < 1 || m > 3)
    throw std::invalid_argument("brute_force_symmetrizer: m must be in {1, 2, 3}");
  if (grid.weight_divisions < m)
    throw std::invalid_argument("weight mesh too coarse for m atoms");

  // Candidate atoms: the lattice anchored at -mu_1 generated by the input's
  // pairwise gaps divided by the configured denominators, stretched past the
  // reflected support by the configured margin.
  const double span = d.atoms.back() - d.atoms.front();
  std::vector<double> candidates;
  if (span <= 0.0) {
    candidates.push_back(-d.atoms.front());
  } else {
    std::vector<double> units;
    for (std::size_t i = 0; i < d.atoms.size(); ++i)
      for (std::size_t j = i + 1; j < d.atoms.size(); ++j)
        for (int den : grid.gap_denominators)
          units.push_back((d.atoms[j] - d.atoms[i]) / static_cast<double>(den));
    const double step = approx_gcd(units);
    const double lo = -d.atoms.back() - grid.range_margin * span;
    const double hi = -d.atoms.front() + grid.range_margin * span;
    const double anchor = -d.atoms.front();
    const long j_lo = static_cast<long>(std::ceil((lo - anchor) / step - 1e-9));
    const long j_hi = static_cast<long>(std::floor((hi - anchor) / step + 1e-9));
    candidates.reserve(static_cast<std::size_t>(j_hi - j_lo + 1));
    for (long j = j_lo; j <= j_hi; ++j)
      candidates.push_back(anchor + static_cast<double>(j) * step);
  }

  const auto mesh = weight_mesh(grid.weight_divisions, m);
  const std::size_t nominal =
      binomial(candidates.size(), static_cast<std::size_t>(m)) * mesh.size();
  if (nominal > grid.max_candidates)
    throw std::invalid_argument("grid too large");

  double d_mean = 0.0;
  for (std::size_t i = 0; i < d.atoms.size(); ++i)
    d_mean += d.atoms[i] * d.weights[i];
  const double loose = 1e-6 * std::max(1.0, std::abs(d.atoms.back()) + span);

  std::vector<FinitePointDistribution> found;
  std::vector<double> atoms(static_cast<std::size_t>(m));
  auto try_subset = [&]() {
    // Necessary conditions first: symmetric extremes and zero mean.
    const double lo_sum = d.atoms.front() + atoms.front();
    const double hi_sum = d.atoms.back() + atoms.back();
    if (std::abs(lo_sum + hi_sum) > loose) return;
    for (const auto& w : mesh) {
      double q_mean = 0.0;
      for (int i = 0; i < m; ++i) q_mean += atoms[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)];
      if (std::abs(d_mean + q_mean) > loose) continue;
      FinitePointDistribution q(atoms, w);
      if (is_zero_symmetric(convolve_finite(d, q), kMemberTol)) found.push_back(q);
    }
  };

  const std::size_t count = candidates.size();
  if (m == 1) {
    for (std::size_t i = 0; i < count; ++i) {
      atoms[0] = candidates[i];
      try_subset();
    }
  } else if (m == 2) {
    for (std::size_t i = 0; i < count; ++i)
      for (std::size_t j = i + 1; j < count; ++j) {
        atoms[0] = candidates[i];
        atoms[1] = candidates[j];
        try_subset();
      }
  } else {
    for (std::size_t i = 0; i < count; ++i)
      for (std::size_t j = i + 1; j < count; ++j)
        for (std::size_t l = j + 1; l < count; ++l) {
          atoms[0] = candidates[i];
          atoms[1] = candidates[j];
          atoms[2] = candidates[l];
          try_subset();
        }
  }
  return found;
}

}  // namespace mixsym
