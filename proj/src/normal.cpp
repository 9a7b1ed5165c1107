#include "rnconv/normal.hpp"

#include <cmath>

#include "rnconv/errors.hpp"

namespace rnc {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kLogSqrt2Pi = 0.9189385332046727;  // log(sqrt(2*pi))

double standardize(double x, const GaussParams& g) { return (x - g.mu) / std::sqrt(g.v); }

}  // namespace

double phi_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double phi_cdf(double x, const GaussParams& g) { return phi_cdf(standardize(x, g)); }

double phi_cdf_complement(double x) { return 0.5 * std::erfc(x / kSqrt2); }

double phi_cdf_complement(double x, const GaussParams& g) {
  return phi_cdf_complement(standardize(x, g));
}

double log_phi_cdf(double x) {
  if (x > -36.0) {
    // erfc does not underflow here
    return std::log(phi_cdf(x));
  }
  // Asymptotic expansion of the Mills ratio for the far left tail:
  // Phi(x) = N(x)/|x| * (1 - 1/x^2 + 3/x^4 - 15/x^6 + ...)
  const double x2 = x * x;
  const double series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
  return -0.5 * x2 - std::log(-x) - kLogSqrt2Pi + std::log(series);
}

double log_phi_cdf(double x, const GaussParams& g) { return log_phi_cdf(standardize(x, g)); }

double log_phi_cdf_complement(double x) { return log_phi_cdf(-x); }

double log_phi_cdf_complement(double x, const GaussParams& g) {
  return log_phi_cdf(-standardize(x, g));
}

double phi_density(double x) { return std::exp(-0.5 * x * x - kLogSqrt2Pi); }

double phi_density(double x, const GaussParams& g) {
  return std::exp(log_phi_density(x, g));
}

double log_phi_density(double x, const GaussParams& g) {
  const double z = standardize(x, g);
  return -0.5 * z * z - kLogSqrt2Pi - 0.5 * std::log(g.v);
}

double phi_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("phi_quantile: p must lie in (0,1)");

  // Acklam's rational approximation, |relative error| < 1.15e-9 over (0,1).
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  for (int i = 0; i < 2; ++i) {
    const double dens = phi_density(x);
    if (dens <= 0.0) break;  // deep tail: the initial guess is all we can refine
    x -= (phi_cdf(x) - p) / dens;
  }
  return x;
}

double phi_quantile(double p, const GaussParams& g) {
  return g.mu + std::sqrt(g.v) * phi_quantile(p);
}

double log_density_ratio(double x, const GaussParams& g) {
  if (g.v == 1.0) {
    return 0.5 * g.mu * g.mu - g.mu * x;
  }
  const double center = g.mu / (1.0 - g.v);
  const double t = x - center;
  return 0.5 * std::log(g.v) - g.mu * g.mu / (2.0 * (1.0 - g.v)) +
         (1.0 - g.v) / (2.0 * g.v) * t * t;
}

double density_ratio(double x, const GaussParams& g) {
  const double lr = log_density_ratio(x, g);
  if (lr > 709.0) return kPosInf;
  return std::exp(lr);
}

Interval monotone_region(const GaussParams& g) {
  if (g.v == 1.0) {
    if (g.mu > 0.0) return Interval{kNegInf, kPosInf, false};
    return Interval{0.0, 0.0, true};
  }
  const double center = g.mu / (1.0 - g.v);
  if (g.v > 1.0) return Interval{center, kPosInf, false};
  return Interval{kNegInf, center, false};
}

}  // namespace rnc
