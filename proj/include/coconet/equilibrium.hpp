#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "coconet/forward_map.hpp"
#include "coconet/network.hpp"
#include "coconet/partition.hpp"

namespace coconet {

struct SolveOptions {
  /// Enumeration visits 3^n partitions; refuse larger inputs.
  int n_max = 12;
  /// Residual and duplicate tolerances scale as residual_scale * (1 + |s|_inf).
  double residual_scale = 1e-8;
  /// Prices within snap_scale * (1 + |s|_inf) of a band edge are snapped
  /// onto it before the strict band check. Must stay below residual_scale
  /// so snapping never masks a genuine mismatch.
  double snap_scale = 1e-9;
};

struct Equilibrium {
  Partition partition;
  PriceVector s;
  AssetVector a;
  double residual = 0.0;             // |L s - (a - b)|_inf after snapping
  std::vector<bool> boundary;        // bank sits exactly on a band edge
};

struct EquilibriumSet {
  std::vector<Equilibrium> items;
  int count() const { return static_cast<int>(items.size()); }
};

/// Solve the cell system of partition p for the price vector: L s = a - b.
/// The cell matrix is provably invertible for every valid network, so a
/// failed solve (non-finite result or large residual) is reported as
/// SingularSystem rather than silently returned.
inline PriceVector solve_candidate(const Partition& p, const AssetVector& a,
                                   const Network& net) {
  if (a.size() != net.n || p.size() != net.n)
    throw SolverError(ErrorCode::DimensionMismatch,
                      "asset vector has " + std::to_string(a.size()) + " entries, partition " +
                          std::to_string(p.size()) + ", network " + std::to_string(net.n));
  const LocalSystem sys = local_system(p, net);
  const Vec rhs = a - sys.b;
  Eigen::PartialPivLU<Mat> lu(sys.L);
  const PriceVector s = lu.solve(rhs);
  const double scale =
      1.0 + rhs.lpNorm<Eigen::Infinity>() + s.lpNorm<Eigen::Infinity>();
  if (!s.allFinite() ||
      (sys.L * s - rhs).lpNorm<Eigen::Infinity>() > 1e-6 * scale)
    throw SolverError(ErrorCode::SingularSystem,
                      "cell solve failed for partition " + p.label());
  return s;
}

struct ConsistencyResult {
  bool consistent = false;
  std::vector<bool> boundary;
};

/// Does s lie in the status bands of p? The converting band is checked with
/// eps slack on its closed edges; bankrupt (s_i < 0) and healthy (s_i > l_i)
/// stay strict. boundary flags banks within eps of a band edge.
inline ConsistencyResult is_consistent(const Partition& p, const PriceVector& s,
                                       const Network& net, double eps = 0.0) {
  ConsistencyResult res;
  res.boundary.assign(static_cast<std::size_t>(net.n), false);
  res.consistent = true;
  for (int i = 0; i < net.n; ++i) {
    bool ok = true;
    switch (p.status(i)) {
      case Status::Bankrupt: ok = s(i) < 0.0; break;
      case Status::Converting: ok = s(i) >= -eps && s(i) <= net.l(i) + eps; break;
      case Status::Healthy: ok = s(i) > net.l(i); break;
    }
    res.consistent = res.consistent && ok;
    res.boundary[static_cast<std::size_t>(i)] =
        std::abs(s(i)) <= eps || std::abs(s(i) - net.l(i)) <= eps;
  }
  return res;
}

namespace detail {

/// Snap prices sitting within eps of their candidate band edges onto the
/// exact edge. Candidates that survive the strict band check afterwards
/// then satisfy partition_of(s, 0) == p, which makes the converting
/// placement of edge banks canonical and the reported partition exact.
inline std::vector<bool> snap_to_band_edges(const Partition& p, PriceVector& s,
                                            const Network& net, double eps) {
  std::vector<bool> boundary(static_cast<std::size_t>(net.n), false);
  for (int i = 0; i < net.n; ++i) {
    const bool near_zero = std::abs(s(i)) <= eps;
    const bool near_l = std::abs(s(i) - net.l(i)) <= eps;
    switch (p.status(i)) {
      case Status::Bankrupt:
        if (near_zero) s(i) = 0.0;
        break;
      case Status::Converting:
        if (near_zero) s(i) = 0.0;
        else if (near_l) s(i) = net.l(i);
        break;
      case Status::Healthy:
        if (near_l) s(i) = net.l(i);
        break;
    }
    boundary[static_cast<std::size_t>(i)] = (s(i) == 0.0 && near_zero) || (s(i) == net.l(i) && near_l);
  }
  return boundary;
}

inline bool in_exact_bands(const Partition& p, const PriceVector& s, const Network& net) {
  for (int i = 0; i < net.n; ++i) {
    switch (p.status(i)) {
      case Status::Bankrupt:
        if (!(s(i) < 0.0)) return false;
        break;
      case Status::Converting:
        if (!(s(i) >= 0.0 && s(i) <= net.l(i))) return false;
        break;
      case Status::Healthy:
        if (!(s(i) > net.l(i))) return false;
        break;
    }
  }
  return true;
}

}  // namespace detail

/// Every equilibrium for asset vector a: all 3^n cell systems are solved
/// and the solutions kept when they fall inside their own status bands.
/// Edge prices are snapped first, so every reported equilibrium places
/// edge banks in the converting block and reproduces a to within the
/// residual tolerance exactly as stored. Results come in ternary partition
/// order; solutions closer together than the duplicate tolerance collapse
/// to one entry, preferring the partition with more converting banks.
inline EquilibriumSet enumerate_equilibria(const AssetVector& a, const Network& net,
                                           const SolveOptions& opt = {}) {
  if (net.n > opt.n_max)
    throw SolverError(ErrorCode::TooManyBanks,
                      "enumeration over 3^n partitions refused for n = " +
                          std::to_string(net.n) + " (limit " + std::to_string(opt.n_max) + ")");
  if (a.size() != net.n)
    throw SolverError(ErrorCode::DimensionMismatch,
                      "asset vector has " + std::to_string(a.size()) + " entries, network has " +
                          std::to_string(net.n));
  EquilibriumSet out;
  const long cells = partition_count(net.n);
  for (long code = 0; code < cells; ++code) {
    const Partition p = Partition::from_index(net.n, code);
    const LocalSystem sys = local_system(p, net);
    const Vec rhs = a - sys.b;
    PriceVector s = Eigen::PartialPivLU<Mat>(sys.L).solve(rhs);
    if (!s.allFinite())
      throw SolverError(ErrorCode::SingularSystem,
                        "cell solve failed for partition " + p.label());
    const double snap_eps = opt.snap_scale * (1.0 + s.lpNorm<Eigen::Infinity>());
    std::vector<bool> boundary = detail::snap_to_band_edges(p, s, net, snap_eps);
    if (!detail::in_exact_bands(p, s, net)) continue;
    const double residual = (sys.L * s - rhs).lpNorm<Eigen::Infinity>();
    if (residual > opt.residual_scale * (1.0 + s.lpNorm<Eigen::Infinity>()))
      throw SolverError(ErrorCode::SingularSystem,
                        "cell solve failed for partition " + p.label());

    bool duplicate = false;
    for (Equilibrium& kept : out.items) {
      const double tol = opt.residual_scale *
                         (1.0 + std::max(s.lpNorm<Eigen::Infinity>(),
                                         kept.s.lpNorm<Eigen::Infinity>()));
      if ((s - kept.s).lpNorm<Eigen::Infinity>() <= tol) {
        duplicate = true;
        // Same price vector under two partitions happens only on band
        // edges; keep the converting-heavy labeling.
        if (p.count(Status::Converting) > kept.partition.count(Status::Converting)) {
          kept.partition = p;
          kept.s = s;
          kept.a = a;
          kept.residual = residual;
          kept.boundary = boundary;
        }
        break;
      }
    }
    if (!duplicate)
      out.items.push_back(Equilibrium{p, std::move(s), a, residual, std::move(boundary)});
  }
  return out;
}

enum class SolvePath { Iteration, EnumerationFallback };

inline const char* to_string(SolvePath p) {
  return p == SolvePath::Iteration ? "iteration" : "enumeration-fallback";
}

struct FictitiousResult {
  Equilibrium eq;
  SolvePath path = SolvePath::Iteration;
  int iterations = 0;  // cell solves performed on the iteration path
};

/// Fictitious conversion: start from the all-healthy partition, solve the
/// cell system, reread statuses off the solution, repeat until the
/// partition reproduces itself. Each round banks may be demoted (or, after
/// an overshoot, promoted back). If no fixed point appears within 3n
/// rounds the search falls back to enumeration and reports that path;
/// NoConvergence is raised only when enumeration also finds nothing.
inline FictitiousResult fictitious_conversion(const AssetVector& a, const Network& net,
                                              const SolveOptions& opt = {}) {
  if (a.size() != net.n)
    throw SolverError(ErrorCode::DimensionMismatch,
                      "asset vector has " + std::to_string(a.size()) + " entries, network has " +
                          std::to_string(net.n));
  Partition p = Partition::uniform(net.n, Status::Healthy);
  const int max_rounds = 3 * net.n;
  for (int round = 1; round <= max_rounds; ++round) {
    const LocalSystem sys = local_system(p, net);
    const Vec rhs = a - sys.b;
    PriceVector s = Eigen::PartialPivLU<Mat>(sys.L).solve(rhs);
    if (!s.allFinite())
      throw SolverError(ErrorCode::SingularSystem,
                        "cell solve failed for partition " + p.label());
    const double snap_eps = opt.snap_scale * (1.0 + s.lpNorm<Eigen::Infinity>());
    std::vector<bool> boundary = detail::snap_to_band_edges(p, s, net, snap_eps);
    const Partition next = partition_of(s, net);
    if (next == p && detail::in_exact_bands(p, s, net)) {
      const double residual = (sys.L * s - rhs).lpNorm<Eigen::Infinity>();
      if (residual <= opt.residual_scale * (1.0 + s.lpNorm<Eigen::Infinity>())) {
        FictitiousResult res;
        res.eq = Equilibrium{p, std::move(s), a, residual, std::move(boundary)};
        res.path = SolvePath::Iteration;
        res.iterations = round;
        return res;
      }
    }
    p = next;
  }
  EquilibriumSet all = enumerate_equilibria(a, net, opt);
  if (all.count() == 0)
    throw SolverError(ErrorCode::NoConvergence,
                      "fictitious conversion found no fixed point within " +
                          std::to_string(max_rounds) + " rounds and enumeration found no equilibrium");
  FictitiousResult res;
  res.eq = all.items.front();
  res.path = SolvePath::EnumerationFallback;
  res.iterations = max_rounds;
  return res;
}

/// Asset vector with no equilibrium at all, witnessing non-existence for a
/// market containing sub-fair bank i. Every other bank is pushed safely
/// into the healthy band (a_j = c_j + l_j (1 + m_j) + 1); bank i's level is
/// the midpoint of the gap interval
///   ( l_i (1 + m_i) - C_i ,  l_i + c_i - C_i ],   C_i = sum_j w_ij c_j,
/// which is nonempty precisely because l_i m_i < c_i: too high for bank i
/// to convert, too low for it to stay healthy.
inline AssetVector subfair_witness(int bank, const Network& net) {
  if (bank < 0 || bank >= net.n)
    throw SolverError(ErrorCode::DimensionMismatch,
                      "bank index " + std::to_string(bank) + " out of range");
  const FairnessClass fc = classify_fairness(net);
  if (fc.bank[static_cast<std::size_t>(bank)] != FairLabel::SubFair)
    throw SolverError(ErrorCode::NotSubFair,
                      "bank " + std::to_string(bank + 1) + " has margin " +
                          std::to_string(fc.margin(bank)) + " (need l_i m_i < c_i)");
  AssetVector a(net.n);
  for (int j = 0; j < net.n; ++j)
    a(j) = net.c(j) + net.l(j) * (1.0 + net.m(j)) + 1.0;
  const double credit_in = net.W.row(bank).dot(net.c);
  const double lo = net.l(bank) * (1.0 + net.m(bank)) - credit_in;
  const double hi = net.l(bank) + net.c(bank) - credit_in;
  a(bank) = 0.5 * (lo + hi);
  return a;
}

}  // namespace coconet
