#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "coconet/error.hpp"

namespace coconet {

using PriceVector = Eigen::VectorXd;
using AssetVector = Eigen::VectorXd;
using EquityVector = Eigen::VectorXd;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Slack applied to the cross-holding column-sum bound: column sums may
/// exceed 1 by at most this much, absorbing accumulated rounding in inputs
/// that were constructed to sum to exactly 1.
inline constexpr double kColumnSumSlack = 1e-12;

/// An interbank network: n banks, conversion ratios m (new shares per unit
/// of debt converted), credit face values c, conversion thresholds l, and
/// cross-holding fractions W (w_ij = fraction of bank j's equity held by
/// bank i). Values are fixed at construction via validated(); treat
/// instances as immutable.
struct Network {
  int n = 0;
  Vec m;
  Vec c;
  Vec l;
  Mat W;

  Mat i_minus_w() const { return Mat::Identity(n, n) - W; }

  /// Validates every primitive and returns the network, or throws
  /// SolverError with the first violated constraint:
  ///   m_i > 0, c_i >= 0, l_i >= 0, consistent dimensions,
  ///   w_ii = 0, 0 <= w_ij <= 1, column sums of W at most 1 (+ slack).
  static Network validated(Vec m, Vec c, Vec l, Mat W) {
    const int n = static_cast<int>(m.size());
    if (n <= 0)
      throw SolverError(ErrorCode::DimensionMismatch, "network must have at least one bank");
    if (c.size() != n || l.size() != n || W.rows() != n || W.cols() != n)
      throw SolverError(ErrorCode::DimensionMismatch,
                        "m has " + std::to_string(n) + " entries but c: " +
                            std::to_string(c.size()) + ", l: " + std::to_string(l.size()) +
                            ", W: " + std::to_string(W.rows()) + "x" +
                            std::to_string(W.cols()));
    for (int i = 0; i < n; ++i) {
      if (!(m(i) > 0.0))
        throw SolverError(ErrorCode::NegativeShareCount,
                          "m[" + std::to_string(i + 1) + "] = " + std::to_string(m(i)) +
                              " (must be > 0)");
      if (!(c(i) >= 0.0))
        throw SolverError(ErrorCode::NegativeCredit,
                          "c[" + std::to_string(i + 1) + "] = " + std::to_string(c(i)));
      if (!(l(i) >= 0.0))
        throw SolverError(ErrorCode::NegativeThreshold,
                          "l[" + std::to_string(i + 1) + "] = " + std::to_string(l(i)));
    }
    for (int j = 0; j < n; ++j) {
      if (W(j, j) != 0.0)
        throw SolverError(ErrorCode::SelfHolding,
                          "w[" + std::to_string(j + 1) + "][" + std::to_string(j + 1) +
                              "] = " + std::to_string(W(j, j)) + " (banks may not hold themselves)");
      double colsum = 0.0;
      for (int i = 0; i < n; ++i) {
        const double w = W(i, j);
        if (!(w >= 0.0) || !(w <= 1.0 + kColumnSumSlack))
          throw SolverError(ErrorCode::BadWeight,
                            "w[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) +
                                "] = " + std::to_string(w) + " (must lie in [0,1])");
        colsum += w;
      }
      if (colsum > 1.0 + kColumnSumSlack)
        throw SolverError(ErrorCode::ColumnSumExceeded,
                          "column " + std::to_string(j + 1) + " of W sums to " +
                              std::to_string(colsum) + " (must be at most 1)");
    }
    Network net;
    net.n = n;
    net.m = std::move(m);
    net.c = std::move(c);
    net.l = std::move(l);
    net.W = std::move(W);
    return net;
  }
};

enum class FairLabel { SubFair, Fair, SuperFair };

inline const char* to_string(FairLabel f) {
  switch (f) {
    case FairLabel::SubFair: return "sub-fair";
    case FairLabel::Fair: return "fair";
    case FairLabel::SuperFair: return "super-fair";
  }
  return "?";
}

struct FairnessClass {
  std::vector<FairLabel> bank;
  Vec margin;        // l_i * m_i - c_i
  FairLabel market;  // sub-fair if any bank is, fair if all are, else super-fair
};

/// Per-bank fairness margin l_i m_i - c_i. Zero margin means conversion at
/// the threshold hands creditors stock worth exactly the cancelled credit;
/// positive margin means creditors gain (super-fair), negative means they
/// lose (sub-fair). The comparison tolerance scales with the margin's own
/// magnitude and never drops below 1e-9 absolute.
inline FairnessClass classify_fairness(const Network& net) {
  FairnessClass out;
  out.margin.resize(net.n);
  out.bank.resize(static_cast<std::size_t>(net.n));
  bool any_sub = false;
  bool all_fair = true;
  for (int i = 0; i < net.n; ++i) {
    const double lm = net.l(i) * net.m(i);
    const double margin = lm - net.c(i);
    const double eps = 1e-9 * std::max(1.0, lm);
    out.margin(i) = margin;
    FairLabel f = FairLabel::Fair;
    if (margin < -eps)
      f = FairLabel::SubFair;
    else if (margin > eps)
      f = FairLabel::SuperFair;
    out.bank[static_cast<std::size_t>(i)] = f;
    any_sub = any_sub || (f == FairLabel::SubFair);
    all_fair = all_fair && (f == FairLabel::Fair);
  }
  out.market = any_sub ? FairLabel::SubFair
                       : (all_fair ? FairLabel::Fair : FairLabel::SuperFair);
  return out;
}

}  // namespace coconet
