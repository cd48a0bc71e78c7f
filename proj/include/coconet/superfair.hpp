#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "coconet/equilibrium.hpp"
#include "coconet/forward_map.hpp"
#include "coconet/network.hpp"
#include "coconet/partition.hpp"
#include "coconet/rng.hpp"

namespace coconet {

namespace detail {

inline bool subset_of(std::uint32_t x, std::uint32_t y) { return (x & ~y) == 0u; }

inline std::string mask_to_string(std::uint32_t mask, int n) {
  std::string out = "{";
  bool first = true;
  for (int i = 0; i < n; ++i)
    if (mask & (1u << i)) {
      if (!first) out += ",";
      out += std::to_string(i + 1);
      first = false;
    }
  return out + "}";
}

}  // namespace detail

/// A super-fair market split into a fair market plus nonnegative credit
/// shifts: the fair network keeps m, l, W but carries credits c* = m l
/// (zero fairness margin), and d = c* - c >= 0 is what each bank's actual
/// credit falls short of the fair level.
struct SuperFairDecomposition {
  Network fair_net;
  Vec d;
  /// Column j is d_j (I - W) e_j, so the shift for a healthy set X is the
  /// sum of its columns.
  Mat shift_columns;

  Vec shift(std::uint32_t mask) const {
    Vec out = Vec::Zero(fair_net.n);
    for (int j = 0; j < fair_net.n; ++j)
      if (mask & (1u << j)) out += shift_columns.col(j);
    return out;
  }
};

/// Build the fair-plus-shift decomposition of a super-fair (or fair)
/// network. Rejects markets with a sub-fair bank and networks whose I - W
/// is numerically singular (reciprocal condition below 1e-12); the
/// fixed-point argument needs its inverse.
inline SuperFairDecomposition decompose(const Network& net) {
  const FairnessClass fc = classify_fairness(net);
  if (fc.market == FairLabel::SubFair) {
    for (int i = 0; i < net.n; ++i)
      if (fc.bank[static_cast<std::size_t>(i)] == FairLabel::SubFair)
        throw SolverError(ErrorCode::NotSuperFair,
                          "bank " + std::to_string(i + 1) + " is sub-fair (margin " +
                              std::to_string(fc.margin(i)) + ")");
  }
  const Mat iw = net.i_minus_w();
  if (Eigen::PartialPivLU<Mat>(iw).rcond() < 1e-12)
    throw SolverError(ErrorCode::SingularIminusW,
                      "I - W is numerically singular; cannot shift credits through it");
  SuperFairDecomposition dec;
  Vec fair_c = net.m.cwiseProduct(net.l);
  dec.d = (fair_c - net.c).cwiseMax(0.0);  // clamp fair banks' rounding dust
  dec.fair_net = Network::validated(net.m, std::move(fair_c), net.l, net.W);
  dec.shift_columns = iw * dec.d.asDiagonal();
  return dec;
}

namespace detail {

/// Unique equilibrium of a fair market. Fictitious conversion with its
/// enumeration fallback covers every asset vector; fair uniqueness makes
/// whichever path succeeded return the same answer.
inline Equilibrium fair_inverse(const AssetVector& a, const Network& fair_net,
                                const SolveOptions& opt) {
  return fictitious_conversion(a, fair_net, opt).eq;
}

struct HealthyAt {
  std::uint32_t mask = 0;
  bool boundary = false;
};

inline HealthyAt healthy_at(const AssetVector& a, const Network& fair_net,
                            const SolveOptions& opt) {
  const Equilibrium eq = fair_inverse(a, fair_net, opt);
  HealthyAt out;
  out.mask = eq.partition.healthy_mask();
  for (bool b : eq.boundary) out.boundary = out.boundary || b;
  return out;
}

}  // namespace detail

/// Healthy block of the unique fair equilibrium at asset level a, as a
/// bitmask (bank i -> bit i). Banks exactly on a band edge count as
/// converting, not healthy.
inline std::uint32_t healthy_set(const AssetVector& a, const Network& fair_net,
                                 const SolveOptions& opt = {}) {
  return detail::healthy_at(a, fair_net, opt).mask;
}

/// One step of the healthy-set iteration: shift credits for the candidate
/// healthy set X, then reread which banks actually end up healthy.
inline std::uint32_t h_map(std::uint32_t x, const AssetVector& a_hat,
                           const SuperFairDecomposition& dec, const SolveOptions& opt = {}) {
  return healthy_set(a_hat + dec.shift(x), dec.fair_net, opt);
}

/// Iterates of X_{k+1} = h(X_k) from X_0 = healthy_set(a_hat), recorded up
/// to and including the confirming repeat: sets = [X_0, ..., X_K] with
/// X_K == X_{K-1}. shifted_points[k] is the fair-market asset level probed
/// at step k.
struct FixedPointTrace {
  std::vector<std::uint32_t> sets;
  std::vector<Vec> shifted_points;
  std::vector<bool> step_boundary;

  int steps() const { return static_cast<int>(shifted_points.size()); }
  std::uint32_t fixed_point() const { return sets.back(); }

  /// The trace without the confirming repeat; a fixed point hit immediately
  /// leaves just [X_0].
  std::vector<std::uint32_t> distinct_sets() const {
    std::vector<std::uint32_t> out = sets;
    if (out.size() >= 2 && out[out.size() - 1] == out[out.size() - 2]) out.pop_back();
    return out;
  }
};

/// Run the healthy-set iteration to its fixed point. The iterates provably
/// sandwich: X_1 between all later sets and X_0, then alternating
/// containments that force termination within 2n + 2 steps. Both the bound
/// and the containments are re-checked every step; a violation aborts with
/// InternalInvariantBroken since it would falsify the construction itself.
inline FixedPointTrace fixed_point_iterate(const AssetVector& a_hat,
                                           const SuperFairDecomposition& dec,
                                           const SolveOptions& opt = {}) {
  const int n = dec.fair_net.n;
  const int max_steps = 2 * n + 2;
  FixedPointTrace trace;
  trace.sets.push_back(detail::healthy_at(a_hat, dec.fair_net, opt).mask);
  for (int k = 0; k <= max_steps; ++k) {
    const std::uint32_t x = trace.sets.back();
    const Vec shifted = a_hat + dec.shift(x);
    const detail::HealthyAt next = detail::healthy_at(shifted, dec.fair_net, opt);
    trace.shifted_points.push_back(shifted);
    trace.step_boundary.push_back(next.boundary);
    trace.sets.push_back(next.mask);

    const std::size_t t = trace.sets.size() - 1;  // index of the newest set
    const auto& sets = trace.sets;
    auto expect = [&](std::uint32_t lo, std::uint32_t hi, const char* what) {
      if (!detail::subset_of(lo, hi))
        throw SolverError(ErrorCode::InternalInvariantBroken,
                          std::string("healthy-set iteration broke containment ") + what +
                              ": " + detail::mask_to_string(lo, n) + " is not inside " +
                              detail::mask_to_string(hi, n));
    };
    if (t == 1) {
      expect(sets[1], sets[0], "X1 within X0");
    } else if (t == 2) {
      expect(sets[1], sets[2], "X1 within X2");
      expect(sets[2], sets[0], "X2 within X0");
    } else {
      const std::size_t m = t - 2;
      if (m % 2 == 1) {
        expect(sets[m], sets[t], "X_m within X_{m+2} (m odd)");
        expect(sets[t], sets[t - 1], "X_{m+2} within X_{m+1} (m odd)");
      } else {
        expect(sets[t - 1], sets[t], "X_{m+1} within X_{m+2} (m even)");
        expect(sets[t], sets[m], "X_{m+2} within X_m (m even)");
      }
    }
    if (next.mask == x) return trace;
  }
  throw SolverError(ErrorCode::InternalInvariantBroken,
                    "healthy-set iteration exceeded " + std::to_string(max_steps) +
                        " steps without repeating");
}

/// Equilibrium of a super-fair market at asset level a_hat, via the
/// decomposition: find the self-consistent healthy set X, solve the fair
/// market at the shifted level a_hat + (I - W) d_X, and keep its price
/// vector. The result is verified to reproduce a_hat under the shifted
/// forward map before it is returned.
inline Equilibrium superfair_solve(const AssetVector& a_hat, const Network& net,
                                   const SolveOptions& opt = {}) {
  const SuperFairDecomposition dec = decompose(net);
  if (a_hat.size() != net.n)
    throw SolverError(ErrorCode::DimensionMismatch,
                      "asset vector has " + std::to_string(a_hat.size()) +
                          " entries, network has " + std::to_string(net.n));
  const FixedPointTrace trace = fixed_point_iterate(a_hat, dec, opt);
  const std::uint32_t x = trace.fixed_point();
  const Vec shifted = a_hat + dec.shift(x);
  Equilibrium eq = detail::fair_inverse(shifted, dec.fair_net, opt);
  if (eq.partition.healthy_mask() != x)
    throw SolverError(ErrorCode::InternalInvariantBroken,
                      "fixed-point healthy set " + detail::mask_to_string(x, net.n) +
                          " disagrees with the solved partition " + eq.partition.label());
  const double residual =
      (phi_hat(eq.s, dec.fair_net, dec.d) - a_hat).lpNorm<Eigen::Infinity>();
  if (residual > opt.residual_scale * (1.0 + eq.s.lpNorm<Eigen::Infinity>()))
    throw SolverError(ErrorCode::InternalInvariantBroken,
                      "shifted forward map failed to reproduce the asset vector (residual " +
                          std::to_string(residual) + ")");
  eq.a = a_hat;
  eq.residual = residual;
  return eq;
}

/// Counts from randomized verification of the healthy-set shift calculus.
/// checked/violations per property; any nonzero violation count falsifies
/// the machinery behind fixed_point_iterate.
struct ShiftLemmaReport {
  int trials = 0;
  // h(X) stays inside H(a) union X.
  long containment_checked = 0;
  long containment_violations = 0;
  // Nonempty X inside H(a) keeps a foothold: X and h(X) intersect.
  long foothold_checked = 0;
  long foothold_violations = 0;
  // Iteration sandwich: X1 within X0.
  long sandwich_start_checked = 0;
  long sandwich_start_violations = 0;
  // X1 within X2 within X0.
  long sandwich_second_checked = 0;
  long sandwich_second_violations = 0;
  // Odd m: X_m within X_{m+2} within X_{m+1}.
  long sandwich_odd_checked = 0;
  long sandwich_odd_violations = 0;
  // Even m > 0: X_{m+1} within X_{m+2} within X_m.
  long sandwich_even_checked = 0;
  long sandwich_even_violations = 0;

  long total_violations() const {
    return containment_violations + foothold_violations + sandwich_start_violations +
           sandwich_second_violations + sandwich_odd_violations + sandwich_even_violations;
  }
};

/// Randomized check of the shift calculus on one decomposition: draws
/// asset vectors spanning all partition regions and random candidate sets,
/// and tallies each property. The iteration is rerun here without the
/// throwing guards so violations are counted, not thrown.
inline ShiftLemmaReport shift_lemma_checks(const SuperFairDecomposition& dec, int trials,
                                           std::uint64_t seed, const SolveOptions& opt = {}) {
  const int n = dec.fair_net.n;
  ShiftLemmaReport rep;
  rep.trials = trials;
  Rng rng(seed);
  double span = 1.0;
  for (int i = 0; i < n; ++i)
    span = std::max({span, dec.fair_net.c(i), dec.fair_net.l(i)});

  for (int t = 0; t < trials; ++t) {
    AssetVector a(n);
    for (int i = 0; i < n; ++i) a(i) = rng.uniform(-2.0 * span - 10.0, 3.0 * span + 10.0);
    const std::uint32_t h_a = healthy_set(a, dec.fair_net, opt);

    const std::uint32_t x = rng.subset(n);
    const std::uint32_t hx = h_map(x, a, dec, opt);
    rep.containment_checked++;
    if (!detail::subset_of(hx, h_a | x)) rep.containment_violations++;

    if (h_a != 0u) {
      // Random nonempty subset of H(a).
      std::uint32_t y = rng.subset(n) & h_a;
      if (y == 0u) y = h_a;
      const std::uint32_t hy = h_map(y, a, dec, opt);
      rep.foothold_checked++;
      if ((y & hy) == 0u) rep.foothold_violations++;
    }

    std::vector<std::uint32_t> sets{h_a};
    for (int k = 0; k <= 2 * n + 2; ++k) {
      const std::uint32_t next = h_map(sets.back(), a, dec, opt);
      sets.push_back(next);
      const std::size_t tt = sets.size() - 1;
      if (tt == 1) {
        rep.sandwich_start_checked++;
        if (!detail::subset_of(sets[1], sets[0])) rep.sandwich_start_violations++;
      } else if (tt == 2) {
        rep.sandwich_second_checked++;
        if (!detail::subset_of(sets[1], sets[2]) || !detail::subset_of(sets[2], sets[0]))
          rep.sandwich_second_violations++;
      } else {
        const std::size_t m = tt - 2;
        if (m % 2 == 1) {
          rep.sandwich_odd_checked++;
          if (!detail::subset_of(sets[m], sets[tt]) || !detail::subset_of(sets[tt], sets[tt - 1]))
            rep.sandwich_odd_violations++;
        } else {
          rep.sandwich_even_checked++;
          if (!detail::subset_of(sets[tt - 1], sets[tt]) || !detail::subset_of(sets[tt], sets[m]))
            rep.sandwich_even_violations++;
        }
      }
      if (next == sets[sets.size() - 2]) break;
    }
  }
  return rep;
}

}  // namespace coconet
