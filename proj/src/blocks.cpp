#include "rnconv/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rnconv/errors.hpp"

namespace rnc {

namespace {

constexpr double kLog2 = 0.6931471805599453;
constexpr double kTieTol = 1e-12;         // |delta log_value| treated as one type class
constexpr double kResidualDrop = 34.54;   // ln(1e15): sub-noise residual of a block

double block_log_mass(const Block& b) { return b.log_multiplicity + b.log_value; }

}  // namespace

BlockDistribution BlockDistribution::from_blocks(std::vector<Block> blocks) {
  if (blocks.empty()) throw InvalidDistribution("block distribution needs at least one block");
  std::sort(blocks.begin(), blocks.end(),
            [](const Block& x, const Block& y) { return x.log_value > y.log_value; });
  std::vector<Block> merged;
  merged.reserve(blocks.size());
  for (const Block& b : blocks) {
    if (!merged.empty() && merged.back().log_value - b.log_value < kTieTol) {
      merged.back().log_multiplicity = log_add_exp(merged.back().log_multiplicity,
                                                   b.log_multiplicity);
    } else {
      merged.push_back(b);
    }
  }
  KahanSum mass;
  for (const Block& b : merged) mass.add(std::exp(block_log_mass(b)));
  if (std::fabs(mass.value() - 1.0) > 1e-9) {
    throw InvalidDistribution("block masses sum to " + std::to_string(mass.value()));
  }
  return BlockDistribution(std::move(merged));
}

BlockDistribution BlockDistribution::from_distribution(const FiniteDistribution& p) {
  std::vector<Block> blocks;
  const auto& probs = p.probs();
  std::size_t i = 0;
  while (i < probs.size()) {
    std::size_t j = i;
    while (j < probs.size() && probs[j] == probs[i]) ++j;
    blocks.push_back({std::log(probs[i]), std::log(static_cast<double>(j - i))});
    i = j;
  }
  return from_blocks(std::move(blocks));
}

double BlockDistribution::prefix_mass(double count) const {
  if (count < 0.0) return 0.0;
  KahanSum mass;
  double remaining = count;
  for (const Block& b : blocks_) {
    const double mult =
        b.log_multiplicity > 709.0 ? kPosInf : std::exp(b.log_multiplicity);
    if (remaining >= mult) {
      mass.add(std::exp(block_log_mass(b)));
      remaining -= mult;
    } else {
      if (remaining > 0.0) mass.add(std::exp(std::log(remaining) + b.log_value));
      remaining = 0.0;
      break;
    }
  }
  return std::min(mass.value(), total_mass());
}

double BlockDistribution::total_mass() const {
  KahanSum mass;
  for (const Block& b : blocks_) mass.add(std::exp(block_log_mass(b)));
  return mass.value();
}

double BlockDistribution::log_atom_count() const {
  double total = kNegInf;
  for (const Block& b : blocks_) total = log_add_exp(total, b.log_multiplicity);
  return total;
}

double BlockDistribution::entropy_bits() const {
  KahanSum h;
  for (const Block& b : blocks_) {
    h.add(-std::exp(block_log_mass(b)) * b.log_value / kLog2);
  }
  return h.value();
}

BlockDistribution tensor_power_blocks(const FiniteDistribution& p, long long n,
                                      std::size_t block_cap) {
  if (n < 1) throw DomainError("tensor_power_blocks: n must be >= 1");
  const auto& probs = p.probs();
  const std::size_t d = probs.size();

  // composition count C(n+d-1, d-1)
  const double log_count =
      std::lgamma(static_cast<double>(n + d)) - std::lgamma(static_cast<double>(n + 1)) -
      std::lgamma(static_cast<double>(d));
  if (log_count > std::log(static_cast<double>(block_cap)) + 1e-9) {
    throw ResourceLimit("tensor_power_blocks: type-class count exceeds block cap");
  }

  std::vector<double> log_probs(d);
  for (std::size_t i = 0; i < d; ++i) log_probs[i] = std::log(probs[i]);
  const double lgamma_n1 = std::lgamma(static_cast<double>(n + 1));

  std::vector<Block> blocks;
  blocks.reserve(static_cast<std::size_t>(std::exp(std::min(log_count, 21.0))));

  // enumerate compositions (k_1, ..., k_d), sum = n
  std::vector<long long> k(d, 0);
  auto rec = [&](auto&& self, std::size_t idx, long long remaining, double lv,
                 double lgamma_ks) -> void {
    if (idx == d - 1) {
      k[idx] = remaining;
      const double lval = lv + static_cast<double>(remaining) * log_probs[idx];
      const double lmult =
          lgamma_n1 - lgamma_ks - std::lgamma(static_cast<double>(remaining + 1));
      blocks.push_back({lval, lmult});
      return;
    }
    for (long long c = 0; c <= remaining; ++c) {
      self(self, idx + 1, remaining - c, lv + static_cast<double>(c) * log_probs[idx],
           lgamma_ks + std::lgamma(static_cast<double>(c + 1)));
    }
  };
  rec(rec, 0, n, 0.0, 0.0);

  return BlockDistribution::from_blocks(std::move(blocks));
}

void for_each_overlay_segment(const BlockDistribution& a, const BlockDistribution& b,
                              const std::function<void(const OverlaySegment&)>& visit) {
  const auto& ba = a.blocks();
  const auto& bb = b.blocks();
  std::size_t i = 0, j = 0;
  double rem_a = ba.empty() ? kNegInf : ba[0].log_multiplicity;
  double rem_b = bb.empty() ? kNegInf : bb[0].log_multiplicity;

  while (i < ba.size() && j < bb.size()) {
    const double step = std::min(rem_a, rem_b);
    visit({step, ba[i].log_value, bb[j].log_value});
    const double next_a = log_sub_exp(rem_a, step);
    const double next_b = log_sub_exp(rem_b, step);
    rem_a = next_a;
    rem_b = next_b;
    if (rem_a <= ba[i].log_multiplicity - kResidualDrop) {
      if (++i < ba.size()) rem_a = ba[i].log_multiplicity;
    }
    if (rem_b <= bb[j].log_multiplicity - kResidualDrop) {
      if (++j < bb.size()) rem_b = bb[j].log_multiplicity;
    }
  }
  while (i < ba.size()) {
    visit({rem_a, ba[i].log_value, kNegInf});
    if (++i < ba.size()) rem_a = ba[i].log_multiplicity;
  }
  while (j < bb.size()) {
    visit({rem_b, kNegInf, bb[j].log_value});
    if (++j < bb.size()) rem_b = bb[j].log_multiplicity;
  }
}

double fidelity(const BlockDistribution& a, const BlockDistribution& b) {
  KahanSum f;
  for_each_overlay_segment(a, b, [&](const OverlaySegment& s) {
    if (s.log_value_a == kNegInf || s.log_value_b == kNegInf) return;
    f.add(std::exp(s.log_count + 0.5 * (s.log_value_a + s.log_value_b)));
  });
  return f.value();
}

}  // namespace rnc
