#include "rnconv/distribution.hpp"

#include <algorithm>
#include <cmath>

#include "rnconv/errors.hpp"
#include "rnconv/numeric.hpp"

namespace rnc {

namespace {
constexpr double kLog2 = 0.6931471805599453;
}

FiniteDistribution::FiniteDistribution(std::vector<double> sorted_probs)
    : probs_(std::move(sorted_probs)) {}

FiniteDistribution FiniteDistribution::from_raw(std::span<const double> raw) {
  std::vector<double> p;
  p.reserve(raw.size());
  double total = 0.0;
  for (double x : raw) {
    if (x < 0.0 || !std::isfinite(x)) {
      throw InvalidDistribution("distribution entries must be finite and nonnegative");
    }
    if (x > 0.0) p.push_back(x);
    total += x;
  }
  if (total <= 0.0) throw InvalidDistribution("distribution has no mass");
  if (p.size() < 2) throw InvalidDistribution("support size must be at least 2");
  for (double& x : p) x /= total;
  std::sort(p.begin(), p.end(), std::greater<>());
  return FiniteDistribution(std::move(p));
}

FiniteDistribution FiniteDistribution::from_raw(std::initializer_list<double> raw) {
  return from_raw(std::span<const double>(raw.begin(), raw.size()));
}

FiniteDistribution FiniteDistribution::uniform(std::size_t m) {
  if (m < 2) throw InvalidDistribution("uniform distribution needs support >= 2");
  return FiniteDistribution(std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

double FiniteDistribution::entropy_bits() const {
  KahanSum h;
  for (double p : probs_) h.add(-p * std::log(p) / kLog2);
  return h.value();
}

double FiniteDistribution::varentropy_bits2() const {
  const double h = entropy_bits();
  KahanSum v;
  for (double p : probs_) {
    const double d = -std::log(p) / kLog2 - h;
    v.add(p * d * d);
  }
  return v.value();
}

bool FiniteDistribution::is_uniform(double tol) const {
  return probs_.front() - probs_.back() <= tol;
}

double fidelity(std::span<const double> q, std::span<const double> q_prime) {
  const std::size_t n = std::min(q.size(), q_prime.size());
  KahanSum f;
  for (std::size_t i = 0; i < n; ++i) f.add(std::sqrt(q[i] * q_prime[i]));
  return f.value();
}

double fidelity(const FiniteDistribution& a, const FiniteDistribution& b) {
  return fidelity(std::span<const double>(a.probs()), std::span<const double>(b.probs()));
}

double hellinger_distance(std::span<const double> q, std::span<const double> q_prime) {
  return std::sqrt(std::max(0.0, 1.0 - fidelity(q, q_prime)));
}

}  // namespace rnc
