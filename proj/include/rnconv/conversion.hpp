#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "rnconv/blocks.hpp"
#include "rnconv/distribution.hpp"

namespace rnc {

enum class ConversionMode { kMajorization, kDeterministic };

// Solution of the majorization-conversion program: the optimal post-conversion
// distribution is proportional to the target on index segments with
// non-increasing scale factors.
struct PlanSegment {
  std::size_t start;  // first atom index (0-based, inclusive)
  std::size_t end;    // last atom index (inclusive)
  double scale;       // P' = scale * Q_sorted on the segment
};

struct ConversionPlan {
  std::vector<PlanSegment> segments;
  std::vector<double> post;  // optimal P', aligned with the sorted target
  double fidelity = 0.0;
  ConversionMode mode = ConversionMode::kMajorization;
};

/// F^M(P -> Q) = max { F(P', Q) : P majorized by P' } with the KKT solution.
std::pair<double, ConversionPlan> maj_fidelity_plan(const FiniteDistribution& p,
                                                    const FiniteDistribution& q);
double maj_fidelity(const FiniteDistribution& p, const FiniteDistribution& q);

/// Same program on run-length inputs; value only.
double maj_fidelity(const BlockDistribution& p, const BlockDistribution& q);

/// Optimal distribution for converting the uniform U_L into Q: the renormalized
/// L largest atoms of Q.
FiniteDistribution dil_distribution(const FiniteDistribution& q, std::size_t l);

/// Optimal distribution for converting P into the uniform U_L: head of P kept,
/// tail averaged over the remaining slots.
FiniteDistribution con_distribution(const FiniteDistribution& p, std::size_t l);

/// Index J splitting head from averaged tail in con_distribution (1-based).
std::size_t con_split_index(const FiniteDistribution& p, std::size_t l);

/// Independent oracle for maj_fidelity on small supports: exhaustive active-set
/// enumeration over tight prefix-constraint patterns plus projected ascent from
/// random starts. Throws ResourceLimit when either support exceeds 6.
double brute_maj_oracle(const FiniteDistribution& p, const FiniteDistribution& q);

/// Exhaustive maximum of F(W(P), Q) over deterministic maps W. Throws
/// ResourceLimit when |Y|^|X| > 1e7.
double det_fidelity_brute(const FiniteDistribution& p, const FiniteDistribution& q);

// Outcome of the interval-aggregation deterministic converter.
struct GreedyConversion {
  double fidelity = 0.0;        // achieved F(W(P), Q), a lower bound on F^D
  double log_group_count = 0.0; // natural log of the number of nonempty groups
};

/// Aggregates consecutive sorted atoms of P into groups tracking consecutive
/// sorted prefixes of Q. `slices` > 0 coarsens the tracking to that many
/// equal-count target slices (0 tracks every atom).
GreedyConversion greedy_det_converter(const BlockDistribution& p, const BlockDistribution& q,
                                      std::size_t slices = 0);

/// Largest L with F^M(P^n -> Q^L) >= nu, by doubling then bisection.
/// The scan asserts that the evaluated fidelities are non-increasing in L.
long long max_convertible_m(const FiniteDistribution& p, const FiniteDistribution& q,
                            long long n, double nu,
                            std::size_t block_cap = kDefaultBlockCap);

}  // namespace rnc
