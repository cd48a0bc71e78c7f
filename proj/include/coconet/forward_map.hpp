#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "coconet/network.hpp"
#include "coconet/partition.hpp"
#include "coconet/rng.hpp"

namespace coconet {

/// Statuses read off a price vector. Band edges go to Converting: the
/// converting band is closed, [-eps, l_i + eps], while bankrupt and healthy
/// are open below and above it. eps = 0 gives the exact bands.
inline Partition partition_of(const PriceVector& s, const Network& net, double eps = 0.0) {
  std::vector<Status> st(static_cast<std::size_t>(net.n));
  for (int i = 0; i < net.n; ++i) {
    if (s(i) < -eps)
      st[static_cast<std::size_t>(i)] = Status::Bankrupt;
    else if (s(i) > net.l(i) + eps)
      st[static_cast<std::size_t>(i)] = Status::Healthy;
    else
      st[static_cast<std::size_t>(i)] = Status::Converting;
  }
  return Partition(std::move(st));
}

/// On one partition cell the price-to-assets map is affine: a = L s + b.
struct LocalSystem {
  Mat L;
  Vec b;
};

/// Assemble the cell system for partition p:
///   column j bankrupt:   (1 + m_j) e_j
///   column j converting: e_j + m_j (I - W) e_j
///   column j healthy:    e_j
///   b = (I - W) c_H  (healthy banks repay their credit in full).
/// Every column is strictly diagonally dominant with margin at least 1
/// (diag - sum|offdiag| = 1 + m_j (1 - colsum_j) for converting columns),
/// so L is always invertible; that is re-checked here and a failure means
/// the library itself is broken, not the input.
inline LocalSystem local_system(const Partition& p, const Network& net) {
  const int n = net.n;
  LocalSystem sys;
  sys.L = Mat::Identity(n, n);
  Vec c_h = Vec::Zero(n);
  for (int j = 0; j < n; ++j) {
    switch (p.status(j)) {
      case Status::Bankrupt:
        sys.L(j, j) += net.m(j);
        break;
      case Status::Converting:
        sys.L(j, j) += net.m(j);
        for (int i = 0; i < n; ++i)
          if (i != j) sys.L(i, j) -= net.m(j) * net.W(i, j);
        break;
      case Status::Healthy:
        c_h(j) = net.c(j);
        break;
    }
  }
  sys.b = net.i_minus_w() * c_h;
  for (int j = 0; j < n; ++j) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      if (i != j) off += std::abs(sys.L(i, j));
    if (!(sys.L(j, j) > off))
      throw SolverError(ErrorCode::InternalInvariantBroken,
                        "cell matrix lost column dominance at column " + std::to_string(j + 1));
  }
  return sys;
}

/// Market-clearing asset level for price vector s: the asset endowment a
/// that makes s an equilibrium, a = L_{B,C} s + b_H on the cell containing s.
inline AssetVector phi(const PriceVector& s, const Network& net) {
  if (s.size() != net.n)
    throw SolverError(ErrorCode::DimensionMismatch,
                      "price vector has " + std::to_string(s.size()) + " entries, network has " +
                          std::to_string(net.n));
  const Partition p = partition_of(s, net);
  const LocalSystem sys = local_system(p, net);
  return sys.L * s + sys.b;
}

/// Shifted forward map for a super-fair market decomposed into a fair
/// network plus credit shifts d >= 0:
///   phi_hat(s) = phi(s) - (I - W) d_H(s),
/// where H(s) is the healthy block at s. Identical to phi on the network
/// with credits c - d; healthy banks repay the smaller face value.
inline AssetVector phi_hat(const PriceVector& s, const Network& fair_net, const Vec& d) {
  if (d.size() != fair_net.n)
    throw SolverError(ErrorCode::DimensionMismatch,
                      "shift vector has " + std::to_string(d.size()) + " entries, network has " +
                          std::to_string(fair_net.n));
  for (int i = 0; i < fair_net.n; ++i)
    if (d(i) < 0.0)
      throw SolverError(ErrorCode::NegativeShift,
                        "d[" + std::to_string(i + 1) + "] = " + std::to_string(d(i)));
  const Partition p = partition_of(s, fair_net);
  Vec d_h = Vec::Zero(fair_net.n);
  for (int i = 0; i < fair_net.n; ++i)
    if (p.status(i) == Status::Healthy) d_h(i) = d(i);
  return phi(s, fair_net) - fair_net.i_minus_w() * d_h;
}

/// One sampled conversion-threshold crossing: the forward map evaluated
/// with bank `bank` converting versus healthy at s_bank = l_bank.
struct BoundaryJump {
  int bank = 0;
  Vec measured;   // a_healthy_side - a_converting_side
  Vec predicted;  // (c_i - l_i m_i) (I - W) e_i
};

struct BoundaryReport {
  FairLabel market = FairLabel::Fair;
  int trials = 0;
  /// Largest relative mismatch, disc / (1 + |a|_inf), over all boundary
  /// pairs that must agree: both band edges on fair networks, only the
  /// zero edge otherwise.
  double max_relative_discrepancy = 0.0;
  double tolerance = 1e-9;
  bool pass = false;
  /// Threshold-edge jumps on non-fair networks, with the closed-form size.
  std::vector<BoundaryJump> jumps;
  double max_jump_error = 0.0;  // |measured - predicted|_inf over jumps
};

/// Samples random points on the status-band edges and compares the two
/// adjacent cell systems. On a fair network both systems must produce the
/// same asset vector (the forward map is continuous); elsewhere the
/// threshold edge jumps by (c_i - l_i m_i)(I - W) e_i and the report
/// records measured against predicted instead of failing.
inline BoundaryReport boundary_consistency_check(const Network& net, int trials,
                                                 std::uint64_t seed) {
  const int n = net.n;
  BoundaryReport rep;
  rep.market = classify_fairness(net).market;
  rep.trials = trials;
  Rng rng(seed);
  const Mat iw = net.i_minus_w();
  double span = 1.0;
  for (int i = 0; i < n; ++i) span = std::max(span, net.l(i));

  for (int t = 0; t < trials; ++t) {
    const int bank = rng.below(n);
    const bool threshold_edge = (rng.bits() & 1u) != 0u;
    PriceVector s(n);
    for (int i = 0; i < n; ++i) s(i) = rng.uniform(-2.0 * span, 3.0 * span);
    s(bank) = threshold_edge ? net.l(bank) : 0.0;

    // Statuses of the other banks come from their own coordinates; the
    // probed bank is placed on both sides of its edge.
    std::vector<Status> closed(static_cast<std::size_t>(n)), open(closed);
    for (int i = 0; i < n; ++i) {
      Status st = Status::Converting;
      if (s(i) < 0.0)
        st = Status::Bankrupt;
      else if (s(i) > net.l(i))
        st = Status::Healthy;
      closed[static_cast<std::size_t>(i)] = st;
      open[static_cast<std::size_t>(i)] = st;
    }
    closed[static_cast<std::size_t>(bank)] = Status::Converting;
    open[static_cast<std::size_t>(bank)] = threshold_edge ? Status::Healthy : Status::Bankrupt;

    const LocalSystem sc = local_system(Partition(closed), net);
    const LocalSystem so = local_system(Partition(open), net);
    const Vec a_closed = sc.L * s + sc.b;
    const Vec a_open = so.L * s + so.b;
    const Vec diff = a_open - a_closed;

    const double lm = net.l(bank) * net.m(bank);
    const bool fair_bank = std::abs(lm - net.c(bank)) <= 1e-9 * std::max(1.0, lm);
    if (threshold_edge && !fair_bank) {
      BoundaryJump jump;
      jump.bank = bank;
      jump.measured = diff;
      jump.predicted = (net.c(bank) - lm) * iw.col(bank);
      rep.max_jump_error = std::max(
          rep.max_jump_error, (jump.measured - jump.predicted).lpNorm<Eigen::Infinity>());
      rep.jumps.push_back(std::move(jump));
    } else {
      const double scale = 1.0 + a_closed.lpNorm<Eigen::Infinity>();
      rep.max_relative_discrepancy =
          std::max(rep.max_relative_discrepancy, diff.lpNorm<Eigen::Infinity>() / scale);
    }
  }
  rep.pass = rep.max_relative_discrepancy <= rep.tolerance;
  return rep;
}

}  // namespace coconet
