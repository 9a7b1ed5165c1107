#pragma once

#include <cmath>

#include "rnconv/numeric.hpp"

namespace rnc {

// Mean and variance of a Gaussian.
struct GaussParams {
  double mu = 0.0;
  double v = 1.0;  // variance, > 0
};

/// Standard normal CDF, accurate in both tails (erfc based).
double phi_cdf(double x);
double phi_cdf(double x, const GaussParams& g);

/// 1 - Phi(x) without cancellation.
double phi_cdf_complement(double x);
double phi_cdf_complement(double x, const GaussParams& g);

/// log Phi(x), stable for arbitrarily negative x.
double log_phi_cdf(double x);
double log_phi_cdf(double x, const GaussParams& g);

/// log(1 - Phi(x)) = log Phi(-x).
double log_phi_cdf_complement(double x);
double log_phi_cdf_complement(double x, const GaussParams& g);

double phi_density(double x);
double phi_density(double x, const GaussParams& g);
double log_phi_density(double x, const GaussParams& g);

/// Inverse of phi_cdf. Rational initial guess plus two Newton steps.
/// Throws DomainError unless 0 < p < 1.
double phi_quantile(double p);
double phi_quantile(double p, const GaussParams& g);

/// log of N(x) / N_{mu,v}(x).
double log_density_ratio(double x, const GaussParams& g);

/// N(x) / N_{mu,v}(x); +inf when the ratio overflows.
double density_ratio(double x, const GaussParams& g);

// Half-open real interval, possibly unbounded or empty.
struct Interval {
  double lo = kNegInf;
  double hi = kPosInf;
  bool is_empty = false;

  bool contains(double x) const { return !is_empty && lo < x && x < hi; }
};

/// Interval on which N(x)/N_{mu,v}(x) is strictly decreasing.
Interval monotone_region(const GaussParams& g);

}  // namespace rnc
