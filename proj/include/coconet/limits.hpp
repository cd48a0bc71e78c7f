#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "coconet/equilibrium.hpp"
#include "coconet/forward_map.hpp"
#include "coconet/network.hpp"
#include "coconet/partition.hpp"

namespace coconet {

/// The equity formulation: v_i = s_i for healthy banks and (1 + m_i) s_i
/// for the rest, which removes the conversion ratio from the unknowns.
/// Finite is the ordinary market. EisenbergNoe is the m -> infinity limit
/// (converting banks hand their whole value to creditors, classic debt
/// clearing); DebtCancellation is m -> 0 (conversion wipes debt without
/// diluting, so v = a pointwise wherever no bank is healthy).
enum class LimitMode { Finite, EisenbergNoe, DebtCancellation };

/// Status bands in equity space. The converting band is [0, gamma_i], the
/// healthy band is v_i > eta_i. In the finite market gamma_i = (1 + m_i) l_i
/// and eta_i = l_i; the bands abut only through the conversion jump. In the
/// EisenbergNoe limit gamma_i = c_i and eta_i = 0: a bank is healthy as
/// soon as it clears its debt with positive equity left.
struct EquityBands {
  Vec gamma;
  Vec eta;
};

inline EquityBands equity_bands(const Network& net, LimitMode mode) {
  EquityBands bands;
  switch (mode) {
    case LimitMode::Finite:
      bands.gamma = (Vec::Ones(net.n) + net.m).cwiseProduct(net.l);
      bands.eta = net.l;
      break;
    case LimitMode::EisenbergNoe:
      bands.gamma = net.c;
      bands.eta = Vec::Zero(net.n);
      break;
    case LimitMode::DebtCancellation:
      bands.gamma = Vec::Constant(net.n, std::numeric_limits<double>::infinity());
      bands.eta = Vec::Constant(net.n, std::numeric_limits<double>::infinity());
      break;
  }
  return bands;
}

/// Cell system in equity space: M v = a - b with
///   M = I - W Diag(g_C),  g_j = m_j / (1 + m_j)  (converting banks only),
///   b = (I - W) c_H,
/// the same b as the price-space system. In the EisenbergNoe limit g_j = 1.
inline LocalSystem equity_system(const Partition& p, const Network& net, LimitMode mode) {
  const int n = net.n;
  LocalSystem sys;
  sys.L = Mat::Identity(n, n);
  Vec c_h = Vec::Zero(n);
  for (int j = 0; j < n; ++j) {
    switch (p.status(j)) {
      case Status::Converting: {
        const double g =
            (mode == LimitMode::EisenbergNoe) ? 1.0 : net.m(j) / (1.0 + net.m(j));
        for (int i = 0; i < n; ++i)
          if (i != j) sys.L(i, j) -= g * net.W(i, j);
        break;
      }
      case Status::Healthy:
        c_h(j) = net.c(j);
        break;
      case Status::Bankrupt:
        break;
    }
  }
  sys.b = net.i_minus_w() * c_h;
  return sys;
}

/// Translate a price-space equilibrium into equity. The result is verified
/// to satisfy the equity cell system to the residual tolerance; both
/// formulations describe the same market, so a mismatch is a library bug.
inline EquityVector equity_from_stock(const Equilibrium& eq, const Network& net,
                                      const SolveOptions& opt = {}) {
  EquityVector v(net.n);
  for (int i = 0; i < net.n; ++i)
    v(i) = (eq.partition.status(i) == Status::Healthy) ? eq.s(i) : (1.0 + net.m(i)) * eq.s(i);
  const LocalSystem sys = equity_system(eq.partition, net, LimitMode::Finite);
  const double res = (sys.L * v - (eq.a - sys.b)).lpNorm<Eigen::Infinity>();
  if (res > opt.residual_scale * (1.0 + v.lpNorm<Eigen::Infinity>() +
                                  eq.a.lpNorm<Eigen::Infinity>()))
    throw SolverError(ErrorCode::InternalInvariantBroken,
                      "equity translation of a price equilibrium violates the equity system "
                      "(residual " + std::to_string(res) + ")");
  return v;
}

struct EquityEquilibrium {
  Partition partition;
  EquityVector v;
  AssetVector a;
  double residual = 0.0;
  std::vector<bool> boundary;
};

struct EquitySet {
  std::vector<EquityEquilibrium> items;
  int count() const { return static_cast<int>(items.size()); }
};

namespace detail {

inline EquitySet enumerate_equity(const AssetVector& a, const Network& net, LimitMode mode,
                                  const SolveOptions& opt) {
  if (net.n > opt.n_max)
    throw SolverError(ErrorCode::TooManyBanks,
                      "enumeration over 3^n partitions refused for n = " +
                          std::to_string(net.n) + " (limit " + std::to_string(opt.n_max) + ")");
  if (a.size() != net.n)
    throw SolverError(ErrorCode::DimensionMismatch,
                      "asset vector has " + std::to_string(a.size()) + " entries, network has " +
                          std::to_string(net.n));
  const EquityBands bands = equity_bands(net, mode);
  EquitySet out;
  const long cells = partition_count(net.n);
  for (long code = 0; code < cells; ++code) {
    const Partition p = Partition::from_index(net.n, code);
    const LocalSystem sys = equity_system(p, net, mode);
    const Vec rhs = a - sys.b;
    EquityVector v = Eigen::PartialPivLU<Mat>(sys.L).solve(rhs);
    if (!v.allFinite())
      throw SolverError(ErrorCode::SingularSystem,
                        "equity cell solve failed for partition " + p.label());

    const double snap_eps = opt.snap_scale * (1.0 + v.lpNorm<Eigen::Infinity>());
    std::vector<bool> boundary(static_cast<std::size_t>(net.n), false);
    bool ok = true;
    for (int i = 0; i < net.n && ok; ++i) {
      const bool near_zero = std::abs(v(i)) <= snap_eps;
      const bool near_gamma = std::abs(v(i) - bands.gamma(i)) <= snap_eps;
      const bool near_eta = std::abs(v(i) - bands.eta(i)) <= snap_eps;
      switch (p.status(i)) {
        case Status::Bankrupt:
          if (near_zero) v(i) = 0.0;
          ok = v(i) < 0.0;
          break;
        case Status::Converting:
          if (near_zero) v(i) = 0.0;
          else if (near_gamma) v(i) = bands.gamma(i);
          ok = v(i) >= 0.0 && v(i) <= bands.gamma(i);
          break;
        case Status::Healthy:
          if (near_eta) v(i) = bands.eta(i);
          ok = v(i) > bands.eta(i);
          break;
      }
      boundary[static_cast<std::size_t>(i)] =
          std::abs(v(i)) <= snap_eps || near_gamma || (v(i) == bands.eta(i) && near_eta);
    }
    if (!ok) continue;
    const double residual = (sys.L * v - rhs).lpNorm<Eigen::Infinity>();
    if (residual > opt.residual_scale * (1.0 + v.lpNorm<Eigen::Infinity>()))
      throw SolverError(ErrorCode::SingularSystem,
                        "equity cell solve failed for partition " + p.label());

    bool duplicate = false;
    for (EquityEquilibrium& kept : out.items) {
      const double tol = opt.residual_scale *
                         (1.0 + std::max(v.lpNorm<Eigen::Infinity>(),
                                         kept.v.lpNorm<Eigen::Infinity>()));
      if ((v - kept.v).lpNorm<Eigen::Infinity>() <= tol) {
        duplicate = true;
        if (p.count(Status::Converting) > kept.partition.count(Status::Converting)) {
          kept.partition = p;
          kept.v = v;
          kept.a = a;
          kept.residual = residual;
          kept.boundary = boundary;
        }
        break;
      }
    }
    if (!duplicate)
      out.items.push_back(EquityEquilibrium{p, std::move(v), a, residual, std::move(boundary)});
  }
  return out;
}

}  // namespace detail

/// Equilibria in the equity formulation of the finite market, by cell
/// enumeration over the equity bands. On fair and super-fair markets the
/// solutions match enumerate_equilibria after equity_from_stock.
inline EquitySet solve_equity(const AssetVector& a, const Network& net,
                              const SolveOptions& opt = {}) {
  return detail::enumerate_equity(a, net, LimitMode::Finite, opt);
}

/// Debt-clearing equilibria in the m -> infinity limit. For a >= 0 the
/// converting/healthy split reproduces the classic clearing outcome: a
/// converting bank distributes its whole value, a healthy bank repays c_i.
/// m and l of the network are not used.
inline EquitySet eisenberg_noe_solve(const AssetVector& a, const Network& net,
                                     const SolveOptions& opt = {}) {
  return detail::enumerate_equity(a, net, LimitMode::EisenbergNoe, opt);
}

/// The m -> 0 limit: conversion cancels debt with vanishing dilution, so
/// equity equals outside assets. Banks split by the sign of a_i; no bank
/// is healthy in this limit (thresholds l = c/m blow up).
inline EquityEquilibrium debt_cancellation_solve(const AssetVector& a, const Network& net) {
  if (a.size() != net.n)
    throw SolverError(ErrorCode::DimensionMismatch,
                      "asset vector has " + std::to_string(a.size()) + " entries, network has " +
                          std::to_string(net.n));
  std::vector<Status> st(static_cast<std::size_t>(net.n));
  for (int i = 0; i < net.n; ++i)
    st[static_cast<std::size_t>(i)] = a(i) >= 0.0 ? Status::Converting : Status::Bankrupt;
  EquityEquilibrium eq;
  eq.partition = Partition(std::move(st));
  eq.v = a;
  eq.a = a;
  eq.residual = 0.0;
  eq.boundary.assign(static_cast<std::size_t>(net.n), false);
  for (int i = 0; i < net.n; ++i)
    eq.boundary[static_cast<std::size_t>(i)] = (a(i) == 0.0);
  return eq;
}

struct LimitRow {
  double m = 0.0;
  EquityVector v;
  Partition partition;
  double dist_en = 0.0;      // |v - v_EisenbergNoe|_inf
  double dist_cancel = 0.0;  // |v - a|_inf
};

/// Sweep a uniform conversion ratio over m_grid, holding c and W fixed and
/// keeping the market fair (l = c / m recomputed per point). Each row
/// carries the equity solution and its distances to the two limit
/// solutions; dist_en should vanish as m grows, dist_cancel as m shrinks
/// (the latter only where the limit leaves no healthy banks).
inline std::vector<LimitRow> limit_convergence_check(const AssetVector& a, const Network& net,
                                                     const std::vector<double>& m_grid,
                                                     const SolveOptions& opt = {}) {
  const EquitySet en_set = eisenberg_noe_solve(a, net, opt);
  if (en_set.count() == 0)
    throw SolverError(ErrorCode::NoConvergence,
                      "no debt-clearing equilibrium found for the limit comparison");
  const EquityVector& v_en = en_set.items.front().v;

  std::vector<LimitRow> rows;
  rows.reserve(m_grid.size());
  for (double m : m_grid) {
    if (!(m > 0.0))
      throw SolverError(ErrorCode::NegativeShareCount,
                        "m grid entry " + std::to_string(m) + " (must be > 0)");
    const Network fair_net = Network::validated(
        Vec::Constant(net.n, m), net.c, net.c / m, net.W);
    const EquitySet es = solve_equity(a, fair_net, opt);
    if (es.count() == 0)
      throw SolverError(ErrorCode::InternalInvariantBroken,
                        "fair market produced no equity equilibrium at m = " + std::to_string(m));
    LimitRow row;
    row.m = m;
    row.v = es.items.front().v;
    row.partition = es.items.front().partition;
    row.dist_en = (row.v - v_en).lpNorm<Eigen::Infinity>();
    row.dist_cancel = (row.v - a).lpNorm<Eigen::Infinity>();
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace coconet
