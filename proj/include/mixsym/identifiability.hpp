#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mixsym/objective.hpp"

namespace mixsym {

// A distribution with finitely many atoms; weights positive and summing
// to 1 (tolerance 1e-12), atoms strictly increasing after merging atoms
// closer than 1e-12 (absolute).
struct FinitePointDistribution {
  std::vector<double> atoms;
  std::vector<double> weights;

  FinitePointDistribution(std::vector<double> atoms, std::vector<double> weights);

  // The k-point distribution placing weight lambda_j at mu_j.
  static FinitePointDistribution from_params(const MixtureParams& params);

  // Reflection over the origin.
  FinitePointDistribution reflected() const;
};

// Distribution of the sum of independent draws: all pairwise atom sums with
// multiplied weights, coinciding sums merged.
FinitePointDistribution convolve_finite(const FinitePointDistribution& a,
                                        const FinitePointDistribution& b);

// True iff each atom a pairs with -a (within tol) carrying the same weight
// (within tol); a middle atom must sit at 0 within tol.
bool is_zero_symmetric(const FinitePointDistribution& d, double tol);

enum class IdentReason {
  ok,
  zero_weight,
  symmetric,
  lambda_half,
  case_a2,
  case_a3,
  case_a4,
  case_a5,
  reflected_case,
  unsupported_k,
};

const char* to_string(IdentReason reason);

// The (c, d, r) parameters locating a point inside one of the excluded
// three-component families.
struct CaseWitness {
  double c = 0.0;
  double d = 0.0;
  double r = 0.0;
};

struct IdentifiabilityVerdict {
  bool member = false;
  IdentReason reason = IdentReason::ok;
  std::optional<CaseWitness> witness;        // present iff reason names a case
  std::optional<double> symmetry_center;     // present iff reason == symmetric
  std::vector<std::string> warnings;         // near-boundary proximity notes
};

// k = 2 membership: excluded exactly when lambda1 is within 1e-9 of
// {0, 1/2, 1}.
IdentifiabilityVerdict in_omega2_star(const MixtureParams& params);

// The k = 3 sufficient condition: all weights positive and the gap ratio
// (mu2 - mu1)/(mu3 - mu2) away from {1/3, 1/2, 1, 2, 3}.
bool corollary1_check(const MixtureParams& params);

// Full k = 3 membership: excluded when a weight vanishes, the point
// distribution is symmetric, or the point (or its reflection) lies in one of
// the four (c, d, r) families; the verdict carries the matching case tag and
// witness.  A true verdict means "identifiable for every component
// distribution"; a false non-case verdict does not mean non-identifiable.
IdentifiabilityVerdict in_omega3_star(const MixtureParams& params);

// Dispatch on k: k = 1 is always a member, k = 2 and 3 as above, larger k
// reports unsupported_k.
IdentifiabilityVerdict check_identifiability(const MixtureParams& params);

// Search-grid specification for the brute-force symmetrizer scan.
struct SymmetrizerGrid {
  // Candidate atoms lie on the lattice anchored at -mu_1 and generated by
  // the input's pairwise gaps divided by these integers.
  std::vector<int> gap_denominators = {1, 2, 3};
  // Candidate weights are positive multiples of 1/weight_divisions.
  int weight_divisions = 20;
  // Extra reach beyond the reflected support, in units of the support span.
  double range_margin = 0.5;
  // Hard cap on atoms-times-weights candidates before enumeration starts.
  std::size_t max_candidates = 10'000'000;
};

// Exhaustive scan for m-point distributions Q on the grid such that
// d * Q is zero-symmetric within 1e-9.  Validates the uniqueness theory on
// small instances: the trivial reflection is always found when it lies on
// the grid, and excluded parameter points yield additional symmetrizers.
// Results are ordered lexicographically by atoms, then weights.
// Throws std::invalid_argument when d has more than 4 atoms, m > 3, or the
// grid exceeds its candidate cap.
std::vector<FinitePointDistribution> brute_force_symmetrizer(
    const FinitePointDistribution& d, int m, const SymmetrizerGrid& grid = {});

}  // namespace mixsym
