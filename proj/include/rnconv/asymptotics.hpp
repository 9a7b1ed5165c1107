#pragma once

#include <span>
#include <vector>

#include "rnconv/blocks.hpp"
#include "rnconv/conversion.hpp"
#include "rnconv/distribution.hpp"

namespace rnc {

// Entropy/varentropy pair constants of a conversion P -> Q.
// D = H(Q)/sqrt(V(P)) and C = (H(P)/V(P)) / (H(Q)/V(Q)) are defined only when
// the respective varentropies are positive; the flags say which side is
// uniform (varentropy zero).
struct RateConstants {
  double h_p = 0.0, h_q = 0.0;  // bits
  double v_p = 0.0, v_q = 0.0;  // bits^2
  bool p_uniform = false, q_uniform = false;
  bool d_defined = false, c_defined = false;
  double d = 0.0;
  double c = 0.0;
};

RateConstants rate_constants(const FiniteDistribution& p, const FiniteDistribution& q);

/// Coefficient of sqrt(n) in the expansion of the maximum convertible number,
/// dispatching between the general, uniform-source, uniform-target and
/// self-conversion branches.
double second_order_rate(const RateConstants& rc, double nu);

/// First- plus second-order expansion (H(P)/H(Q)) n + rate * sqrt(n), as a real
/// number; both uniform with equal entropies gives exactly n.
double second_order_l(const FiniteDistribution& p, const FiniteDistribution& q, double nu,
                      long long n);

/// Limit fidelity sqrt(1 - Z_C(b D)) of conversions at second-order rate b,
/// with the degenerate branches for uniform sides.
double limit_fidelity(const FiniteDistribution& p, const FiniteDistribution& q, double b);

struct ConvergenceRow {
  long long n;
  long long l;
  double exact;
  double limit;
  double gap;
};

/// Exact finite-n fidelity F^M(P^n -> Q^L) at L = floor((H_P/H_Q) n + b sqrt(n))
/// against the limit value, for each n in the grid.
std::vector<ConvergenceRow> convergence_harness(const FiniteDistribution& p,
                                                const FiniteDistribution& q, double b,
                                                std::span<const long long> n_grid,
                                                std::size_t block_cap = kDefaultBlockCap);

}  // namespace rnc
