#include <catch2/catch_amalgamated.hpp>

#include "coconet/superfair.hpp"
#include "support/generators.hpp"

using namespace coconet;

namespace {

AssetVector av(double a, double b) {
  AssetVector v(2);
  v << a, b;
  return v;
}

Network two_bank(double c1, double c2, double w, double l, double m = 1.0) {
  Vec mv = Vec::Constant(2, m);
  Vec cv(2);
  cv << c1, c2;
  Vec lv = Vec::Constant(2, l);
  Mat W(2, 2);
  W << 0.0, w, w, 0.0;
  return Network::validated(mv, cv, lv, W);
}

}  // namespace

TEST_CASE("decomposition splits a super-fair market into fair credits plus shifts") {
  const SuperFairDecomposition dec = decompose(testing::two_bank_market(4.0));
  CHECK(dec.fair_net.c(0) == 8.0);
  CHECK(dec.fair_net.c(1) == 8.0);
  CHECK(dec.d(0) == 4.0);
  CHECK(dec.d(1) == 4.0);
  CHECK(classify_fairness(dec.fair_net).market == FairLabel::Fair);
}

TEST_CASE("decomposition rejects sub-fair markets") {
  try {
    decompose(testing::two_bank_market(12.0));
    FAIL("expected NotSuperFair");
  } catch (const SolverError& e) {
    CHECK(e.code() == ErrorCode::NotSuperFair);
  }
}

TEST_CASE("decomposition rejects markets whose holdings matrix is a permutation") {
  // Column sums of exactly 1 in a two-cycle make I - W singular.
  CHECK_THROWS_AS(decompose(two_bank(4.0, 4.0, 1.0, 8.0)), SolverError);
}

TEST_CASE("shift vectors match the hand-computed columns") {
  SECTION("uniform shift, 30% holdings") {
    const SuperFairDecomposition dec = decompose(two_bank(2.0, 2.0, 0.3, 8.0));
    CHECK(dec.d(0) == 6.0);
    const Vec shift1 = dec.shift(0b01);
    CHECK(shift1(0) == Catch::Approx(6.0));
    CHECK(shift1(1) == Catch::Approx(-1.8));
  }
  SECTION("asymmetric shift, 60% holdings") {
    const SuperFairDecomposition dec = decompose(two_bank(3.5, 0.1, 0.6, 6.0));
    CHECK(dec.d(0) == Catch::Approx(2.5));
    CHECK(dec.d(1) == Catch::Approx(5.9));
    const Vec shift2 = dec.shift(0b10);
    CHECK(shift2(0) == Catch::Approx(-3.54));
    CHECK(shift2(1) == Catch::Approx(5.9));
    const Vec shift12 = dec.shift(0b11);
    CHECK(shift12(0) == Catch::Approx(-1.04));
    CHECK(shift12(1) == Catch::Approx(4.4));
  }
}

TEST_CASE("shift of a set is the sum of its single-bank shifts") {
  Rng rng(5150);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + rng.below(4);
    const SuperFairDecomposition dec =
        decompose(testing::random_superfair_network(rng, n));
    const std::uint32_t x = rng.subset(n);
    Vec sum = Vec::Zero(n);
    for (int j = 0; j < n; ++j)
      if (x & (1u << j)) sum += dec.shift(1u << j);
    CHECK((dec.shift(x) - sum).lpNorm<Eigen::Infinity>() < 1e-12);
  }
}

TEST_CASE("healthy set of a fair market, with edge banks counted as converting") {
  const Network fair = two_bank(6.0, 6.0, 0.6, 6.0);
  CHECK(healthy_set(av(8.5, 20.0), fair) == 0b11u);  // prices (6.1, 17.6)
  CHECK(healthy_set(av(0.0, 0.0), fair) == 0u);
  // phi(6, 17.6) = (8.4, 20) puts bank 1 exactly at its threshold; the
  // edge bank must not count as healthy.
  const AssetVector edge = phi(av(6.0, 17.6), fair);
  CHECK(healthy_set(edge, fair) == 0b10u);
}

TEST_CASE("healthy-set iteration reaches its fixed point on the worked example") {
  const SuperFairDecomposition dec = decompose(two_bank(3.5, 0.1, 0.6, 6.0));
  const AssetVector a = av(8.5, 20.0);

  CHECK(h_map(0b11u, a, dec) == 0b10u);
  CHECK(h_map(0b10u, a, dec) == 0b10u);

  const FixedPointTrace trace = fixed_point_iterate(a, dec);
  REQUIRE(trace.sets.size() == 3);
  CHECK(trace.sets[0] == 0b11u);
  CHECK(trace.sets[1] == 0b10u);
  CHECK(trace.sets[2] == 0b10u);
  CHECK(trace.steps() == 2);
  CHECK(trace.fixed_point() == 0b10u);
  const std::vector<std::uint32_t> distinct = trace.distinct_sets();
  REQUIRE(distinct.size() == 2);
  CHECK(distinct[0] == 0b11u);
  CHECK(distinct[1] == 0b10u);

  // Step 0 probes the fair market at a + (I - W) d_{1,2}.
  CHECK(trace.shifted_points[0](0) == Catch::Approx(7.46));
  CHECK(trace.shifted_points[0](1) == Catch::Approx(24.4));
  CHECK(trace.shifted_points[1](0) == Catch::Approx(4.96));
  CHECK(trace.shifted_points[1](1) == Catch::Approx(25.9));
}

TEST_CASE("zero shift collapses the trace to its starting set") {
  const SuperFairDecomposition dec = decompose(two_bank(6.0, 6.0, 0.6, 6.0));
  CHECK(dec.d.lpNorm<Eigen::Infinity>() == 0.0);
  const FixedPointTrace trace = fixed_point_iterate(av(8.5, 20.0), dec);
  CHECK(trace.steps() == 1);
  const std::vector<std::uint32_t> distinct = trace.distinct_sets();
  REQUIRE(distinct.size() == 1);
  CHECK(distinct[0] == 0b11u);
}

TEST_CASE("super-fair solve reproduces the worked equilibrium") {
  const Network net = two_bank(3.5, 0.1, 0.6, 6.0);
  const Equilibrium eq = superfair_solve(av(8.5, 20.0), net);
  CHECK(eq.partition.label() == "CH");
  CHECK(eq.s(0) == Catch::Approx(4.28).margin(1e-9));
  CHECK(eq.s(1) == Catch::Approx(22.468).margin(1e-9));
  CHECK(eq.residual < 1e-9);
  // It is a genuine equilibrium of the original market.
  CHECK((phi(eq.s, net) - av(8.5, 20.0)).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("super-fair solve matches an enumerated equilibrium on random markets") {
  Rng rng(987654);
  int solved = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + rng.below(3);
    const Network net = testing::random_superfair_network(rng, n);
    const AssetVector a = testing::random_assets(rng, n, -30.0, 50.0);
    const EquilibriumSet es = enumerate_equilibria(a, net);
    REQUIRE(es.count() >= 1);
    const Equilibrium eq = superfair_solve(a, net);
    bool matched = false;
    for (const Equilibrium& cand : es.items)
      matched = matched || (eq.s - cand.s).lpNorm<Eigen::Infinity>() <
                               1e-7 * (1.0 + cand.s.lpNorm<Eigen::Infinity>());
    CHECK(matched);
    ++solved;
  }
  CHECK(solved == 60);
}

TEST_CASE("iteration length never exceeds its guaranteed bound") {
  Rng rng(24601);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + rng.below(4);
    const SuperFairDecomposition dec =
        decompose(testing::random_superfair_network(rng, n));
    const AssetVector a = testing::random_assets(rng, n, -40.0, 60.0);
    const FixedPointTrace trace = fixed_point_iterate(a, dec);
    CHECK(trace.steps() <= 2 * n + 2);
    CHECK(trace.fixed_point() == h_map(trace.fixed_point(), a, dec));
  }
}

TEST_CASE("shift calculus holds on the worked decomposition") {
  const SuperFairDecomposition dec = decompose(two_bank(3.5, 0.1, 0.6, 6.0));
  const ShiftLemmaReport rep = shift_lemma_checks(dec, 300, 13);
  CHECK(rep.trials == 300);
  CHECK(rep.containment_checked == 300);
  CHECK(rep.total_violations() == 0);
  CHECK(rep.foothold_checked > 0);
  CHECK(rep.sandwich_start_checked > 0);
}

TEST_CASE("shift calculus holds on random decompositions") {
  Rng rng(777);
  for (int k = 0; k < 10; ++k) {
    const SuperFairDecomposition dec =
        decompose(testing::random_superfair_network(rng, 2 + rng.below(3)));
    CHECK(shift_lemma_checks(dec, 100, rng.bits()).total_violations() == 0);
  }
}
