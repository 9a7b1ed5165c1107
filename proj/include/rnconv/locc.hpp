#pragma once

#include <Eigen/Core>
#include <span>

#include "rnconv/blocks.hpp"
#include "rnconv/distribution.hpp"

namespace rnc {

// Pure bipartite state given by its coefficient matrix. The squared Schmidt
// coefficients (squared singular values) carry everything the conversion
// theory needs; product states are rejected because the entanglement entropy
// appears in denominators throughout.
class BipartiteState {
 public:
  /// Normalizes the matrix and extracts the Schmidt spectrum. Throws
  /// InvalidState on a zero matrix and ProductStateError when only one
  /// singular value is nonzero.
  static BipartiteState from_matrix(const Eigen::MatrixXcd& coeffs);

  const Eigen::MatrixXcd& coeffs() const { return coeffs_; }
  const FiniteDistribution& schmidt_sq() const { return schmidt_sq_; }

  /// Entanglement entropy S in bits.
  double entropy_bits() const { return entropy_; }
  /// Varentropy V of the Schmidt distribution in bits^2.
  double varentropy_bits2() const { return varentropy_; }
  bool maximally_entangled(double tol = 1e-12) const;

 private:
  BipartiteState(Eigen::MatrixXcd coeffs, FiniteDistribution schmidt);
  Eigen::MatrixXcd coeffs_;
  FiniteDistribution schmidt_sq_;
  double entropy_;
  double varentropy_;
};

/// Schmidt decomposition entry point (same contract as from_matrix).
BipartiteState schmidt(const Eigen::MatrixXcd& coeffs);

/// Optimal LOCC conversion fidelity of psi^(x)n into phi^(x)L, via the
/// majorization reduction on Schmidt spectra.
double locc_fidelity(const BipartiteState& psi, const BipartiteState& phi, long long n,
                     long long l, std::size_t block_cap = kDefaultBlockCap);

enum class CopyMode { kExact, kAsymptotic };

/// Maximum L with conversion fidelity >= nu. Exact mode runs the finite-n
/// engine (integer result); asymptotic mode evaluates the second-order
/// expansion (real result).
double locc_max_copies(const BipartiteState& psi, const BipartiteState& phi, double nu,
                       long long n, CopyMode mode, std::size_t block_cap = kDefaultBlockCap);

/// LOCC cloning with perfect knowledge: copies of psi producible from n copies
/// at fidelity nu. Maximally entangled inputs use the exact closed form
/// floor(n + 2 log_d(1/nu)).
double clone_copies(const BipartiteState& psi, double nu, long long n, CopyMode mode,
                    std::size_t block_cap = kDefaultBlockCap);

/// 1/2 when the Schmidt spectrum has positive varentropy, else 0.
double replication_rate(const BipartiteState& psi);

/// Companion audit value: least-squares slope of log2(L_n - n) against log2 n
/// over the grid, using the exact engine.
double replication_exponent_estimate(const BipartiteState& psi, double nu,
                                     std::span<const long long> n_grid,
                                     std::size_t block_cap = kDefaultBlockCap);

}  // namespace rnc
