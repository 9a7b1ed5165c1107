#include "rnconv/asymptotics.hpp"

#include <cmath>

#include "rnconv/errors.hpp"
#include "rnconv/rayleigh_normal.hpp"

namespace rnc {

namespace {
constexpr double kUniformVarTol = 1e-12;
}

RateConstants rate_constants(const FiniteDistribution& p, const FiniteDistribution& q) {
  RateConstants rc;
  rc.h_p = p.entropy_bits();
  rc.h_q = q.entropy_bits();
  rc.v_p = p.varentropy_bits2();
  rc.v_q = q.varentropy_bits2();
  rc.p_uniform = rc.v_p <= kUniformVarTol;
  rc.q_uniform = rc.v_q <= kUniformVarTol;
  if (!rc.p_uniform) {
    rc.d_defined = true;
    rc.d = rc.h_q / std::sqrt(rc.v_p);
    if (!rc.q_uniform) {
      rc.c_defined = true;
      rc.c = (rc.h_p / rc.v_p) / (rc.h_q / rc.v_q);
    }
  }
  return rc;
}

double second_order_rate(const RateConstants& rc, double nu) {
  if (!(nu > 0.0 && nu < 1.0)) throw DomainError("second_order_rate: nu must lie in (0,1)");
  const double p = 1.0 - nu * nu;
  if (rc.p_uniform && rc.q_uniform) return 0.0;
  if (rc.q_uniform) {
    // target uniform: Z_0 = Phi
    return std::sqrt(rc.v_p) / rc.h_q * phi_quantile(p);
  }
  if (rc.p_uniform) {
    // source uniform, the reflected form of the general rate
    return std::sqrt(rc.v_q * rc.h_p / (rc.h_q * rc.h_q * rc.h_q)) * phi_quantile(p);
  }
  return z_quantile(p, rc.c) / rc.d;
}

double second_order_l(const FiniteDistribution& p, const FiniteDistribution& q, double nu,
                      long long n) {
  const RateConstants rc = rate_constants(p, q);
  const double nn = static_cast<double>(n);
  if (rc.p_uniform && rc.q_uniform && std::fabs(rc.h_p - rc.h_q) < 1e-12) return nn;
  return rc.h_p / rc.h_q * nn + second_order_rate(rc, nu) * std::sqrt(nn);
}

double limit_fidelity(const FiniteDistribution& p, const FiniteDistribution& q, double b) {
  const RateConstants rc = rate_constants(p, q);
  if (rc.p_uniform && rc.q_uniform) {
    return b > 0.0 ? 0.0 : 1.0;  // step limit: the exact value is 2^{-H_Q b sqrt(n)/2} capped
  }
  if (rc.p_uniform) {
    // reflected argument with C_{Q,P} = 0
    const double arg = b * std::sqrt(rc.h_q * rc.h_q * rc.h_q / (rc.h_p * rc.v_q));
    return optimal_root_fidelity(arg, 0.0);
  }
  const double c = rc.c_defined ? rc.c : 0.0;  // Z_0 when the target is uniform
  return optimal_root_fidelity(b * rc.d, c);
}

std::vector<ConvergenceRow> convergence_harness(const FiniteDistribution& p,
                                                const FiniteDistribution& q, double b,
                                                std::span<const long long> n_grid,
                                                std::size_t block_cap) {
  const RateConstants rc = rate_constants(p, q);
  const double lim = limit_fidelity(p, q, b);
  std::vector<ConvergenceRow> rows;
  rows.reserve(n_grid.size());
  for (long long n : n_grid) {
    const double nn = static_cast<double>(n);
    const auto l = static_cast<long long>(
        std::max(1.0, std::floor(rc.h_p / rc.h_q * nn + b * std::sqrt(nn))));
    const double exact = maj_fidelity(tensor_power_blocks(p, n, block_cap),
                                      tensor_power_blocks(q, l, block_cap));
    rows.push_back({n, l, exact, lim, std::fabs(exact - lim)});
  }
  return rows;
}

}  // namespace rnc
