#include "rnconv/conversion.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "rnconv/errors.hpp"

namespace rnc {

namespace {

struct MassSeg {
  std::size_t start;
  std::size_t end;
  double pm;
  double qm;
};

// ratio(a) < ratio(b) by cross-multiplication; qm is nonnegative throughout.
bool ratio_less(const MassSeg& a, const MassSeg& b) { return a.pm * b.qm < b.pm * a.qm; }

// Pool-adjacent-violators merge: push segments left to right, merging while the
// scale would increase, which leaves the KKT-required non-increasing scales.
void pav_push(std::vector<MassSeg>& stack, MassSeg seg) {
  while (!stack.empty() && ratio_less(stack.back(), seg)) {
    seg.pm += stack.back().pm;
    seg.qm += stack.back().qm;
    seg.start = stack.back().start;
    stack.pop_back();
  }
  stack.push_back(seg);
}

double stack_fidelity(const std::vector<MassSeg>& stack) {
  KahanSum f;
  for (const MassSeg& s : stack) f.add(std::sqrt(s.pm * s.qm));
  return f.value();
}

}  // namespace

std::pair<double, ConversionPlan> maj_fidelity_plan(const FiniteDistribution& p,
                                                    const FiniteDistribution& q) {
  const auto& pp = p.probs();
  const auto& qq = q.probs();
  const std::size_t m = qq.size();

  // All prefix constraints tight: the source mass atom by atom, with the last
  // target atom absorbing whatever source mass lies beyond the target support.
  std::vector<double> init(m, 0.0);
  double head = 0.0;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    init[i] = i < pp.size() ? pp[i] : 0.0;
    head += init[i];
  }
  init[m - 1] = std::max(0.0, 1.0 - head);

  std::vector<MassSeg> stack;
  for (std::size_t i = 0; i < m; ++i) pav_push(stack, {i, i, init[i], qq[i]});

  ConversionPlan plan;
  plan.mode = ConversionMode::kMajorization;
  plan.post.resize(m);
  for (const MassSeg& s : stack) {
    const double scale = s.pm / s.qm;
    plan.segments.push_back({s.start, s.end, scale});
    for (std::size_t i = s.start; i <= s.end; ++i) plan.post[i] = scale * qq[i];
  }
  plan.fidelity = stack_fidelity(stack);
  return {plan.fidelity, std::move(plan)};
}

double maj_fidelity(const FiniteDistribution& p, const FiniteDistribution& q) {
  return maj_fidelity_plan(p, q).first;
}

double maj_fidelity(const BlockDistribution& p, const BlockDistribution& q) {
  // Overlay segments covering the target's atoms; the source may exhaust early
  // (zero mass afterwards) or carry surplus past the target's support.
  std::vector<MassSeg> segs;
  KahanSum consumed;
  double last_lva = kNegInf;
  double last_log_count = kNegInf;
  for_each_overlay_segment(p, q, [&](const OverlaySegment& s) {
    if (s.log_value_b == kNegInf) return;  // beyond the target support
    const double pm = s.log_value_a == kNegInf ? 0.0 : std::exp(s.log_count + s.log_value_a);
    const double qm = std::exp(s.log_count + s.log_value_b);
    segs.push_back({0, 0, pm, qm});
    consumed.add(pm);
    last_lva = s.log_value_a;
    last_log_count = s.log_count;
  });
  if (segs.empty()) throw SolverError("maj_fidelity: empty target");

  // Surplus source mass sits on the final target atom; split that atom off its
  // block so the KKT scales stay block-constant elsewhere.
  const double leftover = std::max(0.0, 1.0 - consumed.value());
  const double lvq_last = q.blocks().back().log_value;
  const double pm1 = last_lva == kNegInf ? 0.0 : std::exp(last_lva);
  const double qm1 = std::exp(lvq_last);
  MassSeg atom{0, 0, pm1 + leftover, qm1};
  if (last_log_count < std::log(1.5)) {
    segs.back() = atom;
  } else {
    segs.back().pm = std::max(0.0, segs.back().pm - pm1);
    segs.back().qm = std::max(0.0, segs.back().qm - qm1);
    segs.push_back(atom);
  }

  std::vector<MassSeg> stack;
  for (const MassSeg& s : segs) pav_push(stack, s);
  return std::min(1.0, stack_fidelity(stack));
}

FiniteDistribution dil_distribution(const FiniteDistribution& q, std::size_t l) {
  if (l < 1) throw DomainError("dil_distribution: L must be >= 1");
  const auto& qq = q.probs();
  const std::size_t keep = std::min(l, qq.size());
  std::vector<double> head(qq.begin(), qq.begin() + static_cast<std::ptrdiff_t>(keep));
  return FiniteDistribution::from_raw(head);
}

std::size_t con_split_index(const FiniteDistribution& p, std::size_t l) {
  if (l < 1) throw DomainError("con_distribution: L must be >= 1");
  const auto& pp = p.probs();
  // suffix[j] = sum of P sorted from index j (0-based) on
  std::vector<double> suffix(pp.size() + 1, 0.0);
  for (std::size_t i = pp.size(); i-- > 0;) suffix[i] = suffix[i + 1] + pp[i];

  std::size_t j_split = 1;
  for (std::size_t j = 2; j <= l; ++j) {
    const double tail = j - 1 < pp.size() ? suffix[j - 1] : 0.0;
    const double prev = j - 2 < pp.size() ? pp[j - 2] : 0.0;
    if (tail / static_cast<double>(l + 1 - j) < prev) j_split = j;
  }
  return j_split;
}

FiniteDistribution con_distribution(const FiniteDistribution& p, std::size_t l) {
  const auto& pp = p.probs();
  const std::size_t j_split = con_split_index(p, l);
  std::vector<double> out(l, 0.0);
  double head = 0.0;
  for (std::size_t j = 0; j + 1 < j_split; ++j) {
    out[j] = pp[j];
    head += pp[j];
  }
  const double tail_avg = (1.0 - head) / static_cast<double>(l + 1 - j_split);
  for (std::size_t j = j_split - 1; j < l; ++j) out[j] = tail_avg;
  return FiniteDistribution::from_raw(out);
}

namespace {

// Candidate for one tight-constraint pattern: proportional to the target on
// each segment, with segment masses pinned by the tight prefixes.
bool pattern_candidate(const std::vector<double>& c, const std::vector<double>& q,
                       std::uint32_t mask, std::vector<double>& out) {
  const std::size_t m = q.size();
  out.assign(m, 0.0);
  std::size_t start = 0;
  double c_prev = 0.0;
  for (std::size_t b = 0; b < m; ++b) {
    const bool boundary = b + 1 == m || (mask >> b) & 1u;
    if (!boundary) continue;
    const double pm = c[b] - c_prev;
    double qm = 0.0;
    for (std::size_t i = start; i <= b; ++i) qm += q[i];
    const double scale = pm / qm;
    for (std::size_t i = start; i <= b; ++i) out[i] = scale * q[i];
    c_prev = c[b];
    start = b + 1;
  }
  // interior feasibility
  double run = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    run += out[k];
    if (run < c[k] - 1e-12) return false;
  }
  return true;
}

double ascent_from(std::vector<double> p, const std::vector<double>& q,
                   const std::vector<double>& c) {
  const std::size_t m = q.size();
  // adjacent-pair exchanges keep every prefix constraint except the shared one,
  // which bounds how much mass may move rightwards
  for (int pass = 0; pass < 200; ++pass) {
    double improved = 0.0;
    double prefix = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
      const double s = p[i] + p[i + 1];
      if (s <= 0.0) {
        prefix += p[i];
        continue;
      }
      const double lo = std::max(0.0, c[i] - prefix);  // keep prefix_i >= c_i
      double best = s * q[i] / (q[i] + q[i + 1]);
      best = std::clamp(best, lo, s);
      const double before = std::sqrt(p[i] * q[i]) + std::sqrt(p[i + 1] * q[i + 1]);
      const double after = std::sqrt(best * q[i]) + std::sqrt((s - best) * q[i + 1]);
      if (after > before) {
        improved += after - before;
        p[i] = best;
        p[i + 1] = s - best;
      }
      prefix += p[i];
    }
    if (improved < 1e-15) break;
  }
  double f = 0.0;
  for (std::size_t i = 0; i < m; ++i) f += std::sqrt(p[i] * q[i]);
  return f;
}

}  // namespace

double brute_maj_oracle(const FiniteDistribution& p, const FiniteDistribution& q) {
  if (p.support_size() > 6 || q.support_size() > 6) {
    throw ResourceLimit("brute_maj_oracle: support too large");
  }
  const auto& pp = p.probs();
  const auto& qq = q.probs();
  const std::size_t m = qq.size();

  std::vector<double> c(m, 0.0);
  double run = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    run += k < pp.size() ? pp[k] : 0.0;
    c[k] = std::min(run, 1.0);
  }
  c[m - 1] = 1.0;

  double best = 0.0;
  std::vector<double> cand;
  std::vector<std::vector<double>> feasible;
  for (std::uint32_t mask = 0; mask < (1u << (m - 1)); ++mask) {
    if (!pattern_candidate(c, qq, mask, cand)) continue;
    feasible.push_back(cand);
    double f = 0.0;
    for (std::size_t i = 0; i < m; ++i) f += std::sqrt(cand[i] * qq[i]);
    best = std::max(best, f);
  }

  // Projected ascent from random feasible starts (convex combinations of the
  // enumerated feasible points); concavity makes these converge to the same
  // optimum and guards the enumeration.
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int start = 0; start < 100 && !feasible.empty(); ++start) {
    std::vector<double> x(m, 0.0);
    double wtot = 0.0;
    for (const auto& f : feasible) {
      const double w = -std::log(unif(rng));
      wtot += w;
      for (std::size_t i = 0; i < m; ++i) x[i] += w * f[i];
    }
    for (double& xi : x) xi /= wtot;
    best = std::max(best, ascent_from(std::move(x), qq, c));
  }
  return best;
}

double det_fidelity_brute(const FiniteDistribution& p, const FiniteDistribution& q) {
  const auto& x = p.probs();
  const auto& y = q.probs();
  const std::size_t nx = x.size();
  const std::size_t ny = y.size();
  const double total_maps = std::pow(static_cast<double>(ny), static_cast<double>(nx));
  if (total_maps > 1e7) throw ResourceLimit("det_fidelity_brute: too many maps");

  std::vector<std::size_t> digits(nx, 0);
  std::vector<double> mass(ny, 0.0);
  mass[0] = 1.0;

  auto eval = [&]() {
    double f = 0.0;
    for (std::size_t j = 0; j < ny; ++j) f += std::sqrt(std::max(0.0, mass[j]) * y[j]);
    return f;
  };
  auto rebuild = [&]() {
    std::fill(mass.begin(), mass.end(), 0.0);
    for (std::size_t i = 0; i < nx; ++i) mass[digits[i]] += x[i];
  };

  double best = eval();
  std::uint64_t steps = 0;
  while (true) {
    std::size_t i = 0;
    while (i < nx && digits[i] == ny - 1) {
      mass[ny - 1] -= x[i];
      digits[i] = 0;
      mass[0] += x[i];
      ++i;
    }
    if (i == nx) break;
    mass[digits[i]] -= x[i];
    ++digits[i];
    mass[digits[i]] += x[i];
    if ((++steps & 0xffffu) == 0) rebuild();  // bound incremental drift
    best = std::max(best, eval());
  }
  return best;
}

namespace {

// Greedy interval aggregation on materialized atoms (small inputs, exact).
double greedy_atoms(const std::vector<double>& src, const std::vector<double>& tgt,
                    std::size_t slices, double* group_count) {
  const std::size_t nt = tgt.size();
  std::vector<std::size_t> checkpoints;  // target indices closing each slice
  if (slices == 0 || slices >= nt) {
    checkpoints.resize(nt);
    for (std::size_t j = 0; j < nt; ++j) checkpoints[j] = j;
  } else {
    for (std::size_t s = 1; s <= slices; ++s) {
      checkpoints.push_back(s * nt / slices - 1);
    }
  }

  std::vector<double> w(nt, 0.0);
  double cum_t = 0.0, cum_s = 0.0;
  std::size_t si = 0, j_open = 0;
  double groups = 0.0;
  for (std::size_t cp : checkpoints) {
    for (std::size_t j = j_open; j <= cp; ++j) cum_t += tgt[j];
    std::size_t consumed_begin = si;
    while (cum_s < cum_t - 1e-15 && si < src.size()) cum_s += src[si++];
    const std::size_t atoms = si - consumed_begin;
    const std::size_t span = cp - j_open + 1;
    // spread the consumed atoms evenly over the slice's target atoms
    std::size_t a = consumed_begin;
    for (std::size_t j = j_open; j <= cp; ++j) {
      const std::size_t take = atoms / span + ((j - j_open) < atoms % span ? 1 : 0);
      for (std::size_t t = 0; t < take; ++t) w[j] += src[a++];
      if (take > 0) groups += 1.0;
    }
    j_open = cp + 1;
  }
  if (group_count) *group_count = groups;
  KahanSum f;
  for (std::size_t j = 0; j < nt; ++j) f.add(std::sqrt(w[j] * tgt[j]));
  return f.value();
}

std::vector<double> materialize(const BlockDistribution& b) {
  std::vector<double> atoms;
  for (const Block& blk : b.blocks()) {
    const double mult = std::exp(blk.log_multiplicity);
    const auto n = static_cast<std::size_t>(std::llround(mult));
    const double v = std::exp(blk.log_value);
    for (std::size_t i = 0; i < n; ++i) atoms.push_back(v);
  }
  return atoms;
}

}  // namespace

GreedyConversion greedy_det_converter(const BlockDistribution& p, const BlockDistribution& q,
                                      std::size_t slices) {
  constexpr double kMaterializeCap = 4e6;
  const bool small = p.log_atom_count() < std::log(kMaterializeCap) &&
                     q.log_atom_count() < std::log(kMaterializeCap);
  if (slices > 0 && !small) {
    throw ResourceLimit("greedy_det_converter: slicing requires materializable inputs");
  }
  if (small) {
    GreedyConversion out;
    double groups = 0.0;
    out.fidelity = greedy_atoms(materialize(p), materialize(q), slices, &groups);
    out.log_group_count = groups > 0.0 ? std::log(groups) : kNegInf;
    return out;
  }

  // Scalable walk in the log domain. State: s = consumed source mass beyond the
  // completed targets (log), g = mass of the currently open group (log).
  const auto& sp = p.blocks();
  const auto& tq = q.blocks();
  std::size_t si = 0, ti = 0;
  double ls_rem = sp[0].log_multiplicity;
  double lt_rem = tq[0].log_multiplicity;
  double s = kNegInf, g = kNegInf;
  KahanSum f;
  double lgroups = kNegInf;

  while (ti < tq.size()) {
    const double lq = tq[ti].log_value;
    if (si >= sp.size()) {
      if (g != kNegInf) {
        f.add(std::exp(0.5 * (g + lq)));
        lgroups = log_add_exp(lgroups, 0.0);
        g = kNegInf;
      }
      break;  // remaining targets receive nothing
    }
    const double lp = sp[si].log_value;

    // bulk regime: both remaining counts huge, moderate value ratio
    if (g == kNegInf && ls_rem > 19.0 && lt_rem > 19.0 && std::fabs(lq - lp) < 45.0) {
      const double lr = lq - lp;  // atoms per group
      const double l_fit = ls_rem - lr;
      const double l_take = std::min(lt_rem, l_fit) - 1e-9;
      const double r = std::exp(lr);
      const double k = std::floor(r);
      const double frac = r - k;
      const double l_hi = frac > 0.0 ? l_take + std::log(frac) : kNegInf;
      const double l_lo = frac < 1.0 ? l_take + std::log1p(-frac) : kNegInf;
      if (k > 0.0 && l_lo != kNegInf) {
        f.add(std::exp(l_lo + 0.5 * (std::log(k) + lp + lq)));
        lgroups = log_add_exp(lgroups, l_lo);
      }
      if (l_hi != kNegInf) {
        f.add(std::exp(l_hi + 0.5 * (std::log(k + 1.0) + lp + lq)));
        lgroups = log_add_exp(lgroups, l_hi);
      }
      ls_rem = log_sub_exp(ls_rem, l_take + lr);
      lt_rem = log_sub_exp(lt_rem, l_take);
      s = kNegInf;
      if (lt_rem < 0.0) {
        if (++ti < tq.size()) lt_rem = tq[ti].log_multiplicity;
        continue;
      }
      continue;
    }

    // overshoot already covers whole targets: they get empty groups
    if (g == kNegInf && s >= lq) {
      const double l_skip = std::min(lt_rem, s - lq);
      const double skip = std::max(1.0, std::floor(std::exp(l_skip)));
      s = log_sub_exp(s, std::log(skip) + lq);
      const double new_rem = std::exp(lt_rem) - skip;
      if (new_rem < 0.5) {
        if (++ti < tq.size()) lt_rem = tq[ti].log_multiplicity;
      } else {
        lt_rem = std::log(new_rem);
      }
      continue;
    }

    // per-atom step for the current target
    const double l_need = s == kNegInf ? lq : log_sub_exp(lq, s);
    const double k_raw = std::exp(l_need - lp);
    const double k = std::ceil(k_raw - 1e-9);
    const double avail = ls_rem > 700.0 ? kPosInf : std::exp(ls_rem);
    if (k > avail) {
      // source block exhausts inside this group
      const double l_used = ls_rem + lp;
      g = log_add_exp(g, l_used);
      s = log_add_exp(s, l_used);
      if (++si < sp.size()) ls_rem = sp[si].log_multiplicity;
      continue;
    }
    const double l_kmass = std::log(std::max(k, 0.0)) + lp;
    const double l_group = k > 0.0 ? log_add_exp(g, l_kmass) : g;
    if (l_group != kNegInf) {
      f.add(std::exp(0.5 * (l_group + lq)));
      lgroups = log_add_exp(lgroups, 0.0);
    }
    g = kNegInf;
    s = log_sub_exp(k > 0.0 ? log_add_exp(s, l_kmass) : s, lq);
    if (k > 0.0) {
      const double rem = avail - k;
      ls_rem = rem > 0.5 ? std::log(rem) : kNegInf;
      if (ls_rem == kNegInf && ++si < sp.size()) ls_rem = sp[si].log_multiplicity;
    }
    const double t_rem = std::exp(lt_rem) - 1.0;
    if (t_rem < 0.5) {
      if (++ti < tq.size()) lt_rem = tq[ti].log_multiplicity;
    } else {
      lt_rem = std::log(t_rem);
    }
  }

  GreedyConversion out;
  out.fidelity = std::min(1.0, f.value());
  out.log_group_count = lgroups;
  return out;
}

long long max_convertible_m(const FiniteDistribution& p, const FiniteDistribution& q,
                            long long n, double nu, std::size_t block_cap) {
  if (!(nu > 0.0 && nu < 1.0)) throw DomainError("max_convertible_m: nu must lie in (0,1)");
  if (n < 1) throw DomainError("max_convertible_m: n must be >= 1");

  const BlockDistribution pn = tensor_power_blocks(p, n, block_cap);
  std::vector<std::pair<long long, double>> scanned;
  auto fid = [&](long long l) {
    const double f = maj_fidelity(pn, tensor_power_blocks(q, l, block_cap));
    scanned.emplace_back(l, f);
    return f;
  };

  if (fid(1) < nu) return 0;
  long long lo = 1, hi = 2;
  while (fid(hi) >= nu) {
    lo = hi;
    hi *= 2;
    if (hi > (1LL << 40)) throw SolverError("max_convertible_m: runaway scan");
  }
  while (hi - lo > 1) {
    const long long mid = lo + (hi - lo) / 2;
    (fid(mid) >= nu ? lo : hi) = mid;
  }

  std::sort(scanned.begin(), scanned.end());
  for (std::size_t i = 1; i < scanned.size(); ++i) {
    if (scanned[i].second > scanned[i - 1].second + 1e-9) {
      throw SolverError("max_convertible_m: fidelity not monotone in L near L=" +
                        std::to_string(scanned[i].first));
    }
  }
  return lo;
}

}  // namespace rnc
