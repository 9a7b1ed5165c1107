#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "rnconv/distribution.hpp"
#include "rnconv/numeric.hpp"

namespace rnc {

// Default ceiling on the number of blocks any construction may produce.
inline constexpr std::size_t kDefaultBlockCap = 2'000'000;

// One run of equal-probability atoms, natural-log domain.
struct Block {
  double log_value;
  double log_multiplicity;
};

// Run-length representation of a sorted finite distribution with possibly
// astronomical multiplicities. Values strictly decreasing; total mass 1.
class BlockDistribution {
 public:
  /// Sorts by value decreasing, merges blocks whose log-values differ by less
  /// than 1e-12, and validates unit mass (tolerance 1e-9).
  static BlockDistribution from_blocks(std::vector<Block> blocks);
  static BlockDistribution from_distribution(const FiniteDistribution& p);

  const std::vector<Block>& blocks() const { return blocks_; }

  /// Mass of the `count` largest atoms; count may exceed the atom total
  /// (result saturates at the full mass) and +inf is allowed.
  double prefix_mass(double count) const;

  /// Sum of all block masses (== 1 up to the construction tolerance).
  double total_mass() const;

  /// Natural log of the total atom count.
  double log_atom_count() const;

  /// H in bits evaluated from the run-length form.
  double entropy_bits() const;

 private:
  explicit BlockDistribution(std::vector<Block> blocks) : blocks_(std::move(blocks)) {}
  std::vector<Block> blocks_;
};

/// Block form of the n-fold i.i.d. power of p. Throws ResourceLimit when the
/// type-class count would exceed `block_cap`.
BlockDistribution tensor_power_blocks(const FiniteDistribution& p, long long n,
                                      std::size_t block_cap = kDefaultBlockCap);

// Aligned run of atoms during a simultaneous sorted walk of two block lists.
// Exactly one distribution may already be exhausted, in which case its
// log_value is -inf.
struct OverlaySegment {
  double log_count;
  double log_value_a;
  double log_value_b;
};

/// Walks both sorted atom sequences in lockstep, emitting maximal runs on
/// which both values are constant, then runs of whichever side remains.
void for_each_overlay_segment(const BlockDistribution& a, const BlockDistribution& b,
                              const std::function<void(const OverlaySegment&)>& visit);

/// Fidelity of the decreasing rearrangements, atom by atom.
double fidelity(const BlockDistribution& a, const BlockDistribution& b);

}  // namespace rnc
