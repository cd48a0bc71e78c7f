#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "coconet/forward_map.hpp"
#include "coconet/network.hpp"
#include "coconet/partition.hpp"

namespace coconet {

/// Absolute slack for entrywise sign checks; rounding may push a
/// mathematically zero entry slightly across zero.
inline constexpr double kSignTolerance = 1e-10;

struct InverseNonnegReport {
  bool pass = false;
  double min_entry = 0.0;
  double rcond = 0.0;
};

/// (I - W)^{-1} is entrywise nonnegative for every valid holdings matrix
/// (it is the sum of the convergent series over powers of W). Verified
/// directly by inverting.
inline InverseNonnegReport check_inverse_nonneg(const Mat& W) {
  if (W.rows() != W.cols())
    throw SolverError(ErrorCode::DimensionMismatch, "holdings matrix must be square");
  const int n = static_cast<int>(W.rows());
  const Mat iw = Mat::Identity(n, n) - W;
  Eigen::PartialPivLU<Mat> lu(iw);
  InverseNonnegReport rep;
  rep.rcond = lu.rcond();
  if (rep.rcond < 1e-12)
    throw SolverError(ErrorCode::SingularIminusW,
                      "I - W is numerically singular (rcond below 1e-12)");
  const Mat inv = lu.inverse();
  rep.min_entry = inv.minCoeff();
  rep.pass = rep.min_entry >= -kSignTolerance;
  return rep;
}

struct SignPatternReport {
  bool pass = false;
  double min_diagonal = 0.0;
  double max_offdiagonal = 0.0;
};

/// The matrix L_{B,C}^{-1} (I - W) carries the comparative statics of
/// equilibria: nonnegative diagonal, nonpositive off-diagonal. Computed by
/// solving L X = I - W column by column.
inline SignPatternReport check_sign_pattern(const Partition& p, const Network& net) {
  const LocalSystem sys = local_system(p, net);
  const Mat M = Eigen::PartialPivLU<Mat>(sys.L).solve(net.i_minus_w());
  SignPatternReport rep;
  rep.min_diagonal = M.diagonal().minCoeff();
  rep.max_offdiagonal = -std::numeric_limits<double>::infinity();
  bool have_off = false;
  for (int j = 0; j < net.n; ++j)
    for (int i = 0; i < net.n; ++i)
      if (i != j) {
        rep.max_offdiagonal = std::max(rep.max_offdiagonal, M(i, j));
        have_off = true;
      }
  if (!have_off) rep.max_offdiagonal = 0.0;  // n = 1
  rep.pass = rep.min_diagonal >= -kSignTolerance && rep.max_offdiagonal <= kSignTolerance;
  return rep;
}

struct DiagDominanceReport {
  bool pass = false;
  /// Smallest column margin diag - sum |offdiag|; at least 1 in exact
  /// arithmetic (the converting-column margin is 1 + m_j (1 - colsum_j)).
  double min_margin = 0.0;
};

/// Strict column diagonal dominance of the cell matrix, for every
/// partition cell. This is what makes every cell system solvable.
inline DiagDominanceReport check_diag_dominance(const Partition& p, const Network& net) {
  const LocalSystem sys = local_system(p, net);
  DiagDominanceReport rep;
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (int j = 0; j < net.n; ++j) {
    double off = 0.0;
    for (int i = 0; i < net.n; ++i)
      if (i != j) off += std::abs(sys.L(i, j));
    rep.min_margin = std::min(rep.min_margin, sys.L(j, j) - off);
  }
  rep.pass = rep.min_margin > 0.0;
  return rep;
}

}  // namespace coconet
