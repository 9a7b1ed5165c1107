#include "rnconv/rayleigh_normal.hpp"

#include <algorithm>
#include <cmath>

#include "rnconv/errors.hpp"

namespace rnc {

namespace {

// Sign-equivalent forms of the defining zero-point functions, evaluated in the
// log domain so that tail products never under- or overflow.
//
// beta (v < 1):  f(x) = (1 - Phi_{mu,v}(x)) - (1 - Phi(x)) N_{mu,v}(x)/N(x)
//   sign(f) = sign( log Phic_{mu,v}(x) - log Phic(x) + log(N/N_{mu,v})(x) )
// alpha (v > 1): h(x) = (N/N_{mu,v})(x) Phi_{mu,v}(x) - Phi(x)
//   sign(h) = sign( log(N/N_{mu,v})(x) + log Phi_{mu,v}(x) - log Phi(x) )

double beta_sign(double x, const GaussParams& g) {
  return log_phi_cdf_complement(x, g) - log_phi_cdf_complement(x) + log_density_ratio(x, g);
}

double alpha_sign(double x, const GaussParams& g) {
  return log_density_ratio(x, g) + log_phi_cdf(x, g) - log_phi_cdf(x);
}

double ratio_log_derivative(double x, const GaussParams& g) {
  const double center = g.mu / (1.0 - g.v);
  return (1.0 - g.v) / g.v * (x - center);
}

template <class SignFn, class DerivFn>
double bisect_root(SignFn&& sgn, DerivFn&& dsgn, double lo, double hi) {
  // lo has positive sign, hi negative
  for (int i = 0; i < 200 && hi - lo > 1e-13 * std::max({1.0, std::fabs(lo), std::fabs(hi)});
       ++i) {
    const double mid = 0.5 * (lo + hi);
    const double s = sgn(mid);
    if (s == 0.0) return mid;
    (s > 0.0 ? lo : hi) = mid;
  }
  // Newton polish inside the final bracket
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 3; ++i) {
    const double d = dsgn(x);
    if (d == 0.0 || !std::isfinite(d)) break;
    const double step = sgn(x) / d;
    const double next = x - step;
    if (!(next > lo && next < hi)) break;
    x = next;
  }
  return x;
}

}  // namespace

double beta_root(double mu, double v) {
  if (!(v > 0.0 && v < 1.0)) throw DomainError("beta_root: requires 0 < v < 1");
  const GaussParams g{mu, v};
  const double center = mu / (1.0 - v);
  // f decreases left of the center and the root lies there, so look leftwards.
  if (!(beta_sign(center, g) < 0.0)) throw RootBracketError("beta_root: no sign change at center");
  double step = std::max(1.0, std::sqrt(v));
  double lo = center - step;
  int tries = 0;
  while (!(beta_sign(lo, g) > 0.0)) {
    step *= 2.0;
    lo = center - step;
    if (++tries > 200) throw RootBracketError("beta_root: bracketing failed");
  }
  auto sgn = [&](double x) { return beta_sign(x, g); };
  auto dsgn = [&](double x) {
    return -std::exp(log_phi_density(x, g) - log_phi_cdf_complement(x, g)) +
           std::exp(log_phi_density(x, {0.0, 1.0}) - log_phi_cdf_complement(x)) +
           ratio_log_derivative(x, g);
  };
  return bisect_root(sgn, dsgn, lo, center);
}

double alpha_root(double mu, double v) {
  if (!(v > 1.0)) throw DomainError("alpha_root: requires v > 1");
  const GaussParams g{mu, v};
  const double center = mu / (1.0 - v);
  // h increases left of the center and the root lies to the right.
  if (!(alpha_sign(center, g) > 0.0)) throw RootBracketError("alpha_root: no sign change at center");
  double step = std::max(1.0, std::sqrt(v));
  double hi = center + step;
  int tries = 0;
  while (!(alpha_sign(hi, g) < 0.0)) {
    step *= 2.0;
    hi = center + step;
    if (++tries > 200) throw RootBracketError("alpha_root: bracketing failed");
  }
  auto sgn = [&](double x) { return alpha_sign(x, g); };
  auto dsgn = [&](double x) {
    return ratio_log_derivative(x, g) +
           std::exp(log_phi_density(x, g) - log_phi_cdf(x, g)) -
           std::exp(log_phi_density(x, {0.0, 1.0}) - log_phi_cdf(x));
  };
  // The sign function is positive at the center, negative at hi; reuse the
  // bisection with lo = center.
  return bisect_root(sgn, dsgn, center, hi);
}

namespace {

double i_term_log_prefactor(double mu, double v) {
  return 0.5 * std::log(2.0 * std::sqrt(v) / (1.0 + v)) - mu * mu / (4.0 * (1.0 + v));
}

GaussParams i_term_gauss(double mu, double v) {
  return GaussParams{mu / (1.0 + v), 2.0 * v / (1.0 + v)};
}

}  // namespace

double i_term(double mu, double v, double x) {
  if (!(v > 0.0)) throw DomainError("i_term: requires v > 0");
  if (x == kPosInf) return i_term_infinity(mu, v);
  return std::exp(i_term_log_prefactor(mu, v) + log_phi_cdf(x, i_term_gauss(mu, v)));
}

double i_term_infinity(double mu, double v) {
  if (!(v > 0.0)) throw DomainError("i_term: requires v > 0");
  return std::exp(i_term_log_prefactor(mu, v));
}

RNParams::RNParams(double mu, double v) : mu_(mu), v_(v) {
  if (!(v >= 0.0)) throw DomainError("RNParams: requires v >= 0");
  if (v == 0.0 || std::fabs(v - 1.0) < kVarianceNearOne) return;
  if (std::fabs(mu) > kMuClamp) return;  // clamped regime, root never used
  root_ = v < 1.0 ? beta_root(mu, v) : alpha_root(mu, v);
}

double optimal_root_fidelity(double mu, double v) {
  if (!(v >= 0.0)) throw DomainError("z_cdf: requires v >= 0");
  if (v == 0.0) return std::exp(0.5 * log_phi_cdf_complement(mu));
  if (mu < -kMuClamp) return 1.0;
  if (mu > kMuClamp) return 0.0;
  if (std::fabs(v - 1.0) < kVarianceNearOne) {
    return mu <= 0.0 ? 1.0 : std::exp(-mu * mu / 8.0);
  }
  const RNParams params(mu, v);
  const GaussParams g{mu, v};
  double f;
  if (v < 1.0) {
    const double b = params.root();
    f = std::exp(0.5 * (log_phi_cdf_complement(b) + log_phi_cdf_complement(b, g))) +
        i_term(mu, v, b);
  } else {
    const double a = params.root();
    f = std::exp(0.5 * (log_phi_cdf(a) + log_phi_cdf(a, g))) +
        std::exp(i_term_log_prefactor(mu, v) + log_phi_cdf_complement(a, i_term_gauss(mu, v)));
  }
  return std::clamp(f, 0.0, 1.0);
}

double z_cdf(double mu, double v) {
  if (!(v >= 0.0)) throw DomainError("z_cdf: requires v >= 0");
  if (v == 0.0) return phi_cdf(mu);
  if (std::fabs(v - 1.0) < kVarianceNearOne) {
    return mu > 0.0 ? -std::expm1(-mu * mu / 4.0) : 0.0;
  }
  const double f = optimal_root_fidelity(mu, v);
  return std::clamp(1.0 - f * f, 0.0, 1.0);
}

double z_quantile(double p, double v) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("z_quantile: p must lie in (0,1)");
  if (!(v >= 0.0)) throw DomainError("z_quantile: requires v >= 0");
  if (v == 0.0) return phi_quantile(p);
  if (std::fabs(v - 1.0) < kVarianceNearOne) {
    return 2.0 * std::sqrt(-std::log1p(-p));  // invert 1 - e^{-mu^2/4}
  }
  double lo = -1.0, hi = 1.0;
  while (z_cdf(lo, v) > p && lo > -44.0) lo *= 2.0;
  while (z_cdf(hi, v) < p && hi < 44.0) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-11; ++i) {
    const double mid = 0.5 * (lo + hi);
    (z_cdf(mid, v) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

OptimizerFunction::OptimizerFunction(const RNParams& params)
    : params_(params), breakpoint_(kNegInf) {
  const double mu = params.mu();
  const double v = params.v();
  if (!(v > 0.0)) throw DomainError("optimizer_function: requires v > 0");
  const GaussParams g{mu, v};
  if (std::fabs(v - 1.0) < kVarianceNearOne) {
    branch_ = mu < 0.0 ? Branch::ShiftedEverywhere : Branch::StdEverywhere;
    return;
  }
  if (!params.has_root()) throw DomainError("optimizer_function: parameters in clamped regime");
  breakpoint_ = params.root();
  if (v > 1.0) {
    branch_ = Branch::StdAbove;
    log_scale_ = log_phi_cdf(breakpoint_) - log_phi_cdf(breakpoint_, g);
  } else {
    branch_ = Branch::StdBelow;
    log_scale_ = log_phi_cdf_complement(breakpoint_) - log_phi_cdf_complement(breakpoint_, g);
  }
}

double OptimizerFunction::value(double x) const {
  const GaussParams g{params_.mu(), params_.v()};
  switch (branch_) {
    case Branch::StdEverywhere:
      return phi_cdf(x);
    case Branch::ShiftedEverywhere:
      return phi_cdf(x, {params_.mu(), 1.0});
    case Branch::StdAbove:
      if (x <= breakpoint_) return std::exp(log_scale_ + log_phi_cdf(x, g));
      return phi_cdf(x);
    case Branch::StdBelow:
      if (x <= breakpoint_) return phi_cdf(x);
      return 1.0 - std::exp(log_scale_ + log_phi_cdf_complement(x, g));
  }
  return 0.0;
}

double OptimizerFunction::log_density(double x) const {
  const GaussParams g{params_.mu(), params_.v()};
  switch (branch_) {
    case Branch::StdEverywhere:
      return log_phi_density(x, {0.0, 1.0});
    case Branch::ShiftedEverywhere:
      return log_phi_density(x, {params_.mu(), 1.0});
    case Branch::StdAbove:
      if (x <= breakpoint_) return log_scale_ + log_phi_density(x, g);
      return log_phi_density(x, {0.0, 1.0});
    case Branch::StdBelow:
      if (x <= breakpoint_) return log_phi_density(x, {0.0, 1.0});
      return log_scale_ + log_phi_density(x, g);
  }
  return kNegInf;
}

double OptimizerFunction::density(double x) const { return std::exp(log_density(x)); }

OptimizerFunction optimizer_function(const RNParams& params) { return OptimizerFunction(params); }

namespace {

template <class F>
double adaptive_simpson(F&& f, double a, double b, double fa, double fm, double fb, double whole,
                        double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::fabs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
  if (depth <= 0) throw QuadratureError("continuous_fidelity: refinement limit reached");
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

template <class F>
double integrate(F&& f, double a, double b, double eps) {
  if (!(b > a)) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, eps, 48);
}

}  // namespace

double continuous_fidelity(const OptimizerFunction& a, const GaussParams& g) {
  const double mu = a.params().mu();
  const double v = std::max(a.params().v(), 1e-12);
  const double width = 14.0 * std::max({1.0, std::sqrt(v), std::sqrt(g.v)});
  double lo = std::min({0.0, mu, g.mu}) - width;
  double hi = std::max({0.0, mu, g.mu}) + width;

  auto integrand = [&](double x) {
    const double ld = a.log_density(x) + log_phi_density(x, g);
    return std::exp(0.5 * ld);
  };

  const double bp = a.breakpoint();
  double total = 0.0;
  if (bp > lo && bp < hi) {
    total += integrate(integrand, lo, bp, 5e-11);
    total += integrate(integrand, bp, hi, 5e-11);
  } else {
    total += integrate(integrand, lo, hi, 1e-10);
  }
  return std::min(total, 1.0);
}

}  // namespace rnc
