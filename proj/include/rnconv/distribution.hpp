#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rnc {

// Finite probability distribution held in decreasing sorted order with zero
// atoms dropped. Support size is at least 2 (zero-entropy distributions are
// rejected throughout).
class FiniteDistribution {
 public:
  /// Normalizes nonnegative masses, sorts decreasing and drops zero atoms.
  /// Throws InvalidDistribution on negative entries, all-zero input, or a
  /// support smaller than 2.
  static FiniteDistribution from_raw(std::span<const double> raw);
  static FiniteDistribution from_raw(std::initializer_list<double> raw);

  static FiniteDistribution uniform(std::size_t m);

  /// Sorted decreasing, strictly positive, sums to 1.
  const std::vector<double>& probs() const { return probs_; }
  std::size_t support_size() const { return probs_.size(); }

  /// H(P) in bits.
  double entropy_bits() const;
  /// V(P) in bits^2; zero exactly for uniform distributions.
  double varentropy_bits2() const;

  bool is_uniform(double tol = 1e-12) const;

 private:
  explicit FiniteDistribution(std::vector<double> sorted_probs);
  std::vector<double> probs_;
};

/// Bhattacharyya fidelity of two vectors on a common indexed alphabet; the
/// shorter vector is padded with zeros. No sorting or normalization happens.
double fidelity(std::span<const double> q, std::span<const double> q_prime);

/// Fidelity of the decreasing rearrangements.
double fidelity(const FiniteDistribution& a, const FiniteDistribution& b);

/// sqrt(1 - F).
double hellinger_distance(std::span<const double> q, std::span<const double> q_prime);

}  // namespace rnc
