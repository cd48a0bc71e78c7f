#include <catch2/catch_amalgamated.hpp>

#include "coconet/region.hpp"
#include "support/generators.hpp"

using namespace coconet;

TEST_CASE("asset grid over a fair market has one equilibrium everywhere") {
  const GridMap map = grid_map(testing::two_bank_market(8.0), -10.0, 25.0, 8);
  REQUIRE(map.cells.size() == 64);
  for (const GridCell& cell : map.cells) {
    CHECK(cell.count == 1);
    REQUIRE(cell.labels.size() == 1);
  }
  const OverlapSummary summary = overlap_summary(map);
  CHECK(summary.histogram.at(1) == 64);
  CHECK(summary.coexisting.empty());
}

TEST_CASE("asset grid over a super-fair market shows the overlap region") {
  // Unit steps from -10 to 20 pass through (-6, 16), where the converting
  // and bankrupt/healthy solutions coexist.
  const GridMap map = grid_map(testing::two_bank_market(4.0), -10.0, 20.0, 31);
  const int res = map.resolution;
  auto cell_at = [&](double x, double y) -> const GridCell& {
    const int i = static_cast<int>(std::lround(x - map.lo));
    const int j = static_cast<int>(std::lround(y - map.lo));
    return map.cells[static_cast<std::size_t>(i * res + j)];
  };
  const GridCell& overlap = cell_at(-6.0, 16.0);
  REQUIRE(overlap.count == 2);
  CHECK(overlap.labels[0] == "CC");
  CHECK(overlap.labels[1] == "BH");

  const OverlapSummary summary = overlap_summary(map);
  CHECK(summary.histogram.count(2) == 1);
  CHECK(summary.coexisting.count({"BH", "CC"}) == 1);
  // Far in the positive quadrant the market is uniquely healthy.
  CHECK(cell_at(20.0, 20.0).count == 1);
  CHECK(cell_at(20.0, 20.0).labels[0] == "HH");
}

TEST_CASE("grid respects the base point and axis selection") {
  Vec m = Vec::Constant(3, 1.0);
  Vec c = Vec::Constant(3, 8.0);
  Vec l = Vec::Constant(3, 8.0);
  Mat W = Mat::Zero(3, 3);
  W(0, 1) = W(1, 0) = 0.4;
  W(1, 2) = W(2, 1) = 0.4;
  const Network net = Network::validated(m, c, l, W);
  Vec base(3);
  base << 0.0, 0.0, 30.0;  // bank 3 pinned deep in the healthy region
  const GridMap map = grid_map(net, 5.0, 15.0, 3, 0, 1, base);
  REQUIRE(map.cells.size() == 9);
  for (const GridCell& cell : map.cells) {
    REQUIRE(cell.count == 1);
    CHECK(cell.labels[0].size() == 3);
    CHECK(cell.labels[0][2] == 'H');
  }
}

TEST_CASE("grid rejects bad axes and resolutions") {
  const Network net = testing::two_bank_market(8.0);
  CHECK_THROWS_AS(grid_map(net, 0.0, 1.0, 0), SolverError);
  CHECK_THROWS_AS(grid_map(net, 0.0, 1.0, 4, 0, 0), SolverError);
  CHECK_THROWS_AS(grid_map(net, 0.0, 1.0, 4, 0, 2), SolverError);
}

TEST_CASE("single-cell grid sits at the window corner") {
  const GridMap map = grid_map(testing::two_bank_market(8.0), 10.0, 99.0, 1);
  REQUIRE(map.cells.size() == 1);
  CHECK(map.cells[0].x == 10.0);
  CHECK(map.cells[0].y == 10.0);
}

TEST_CASE("price-space map labels each point by its status cell") {
  const Network net = testing::two_bank_market(8.0);
  const GridMap map = price_space_map(net, -4.0, 12.0, 5);
  REQUIRE(map.cells.size() == 25);
  for (const GridCell& cell : map.cells) {
    REQUIRE(cell.count == 1);
    PriceVector s(2);
    s << cell.x, cell.y;
    CHECK(cell.labels[0] == partition_of(s, net).label());
  }
  // Corners: (-4, -4) is bankrupt/bankrupt, (12, 12) healthy/healthy.
  CHECK(map.cells.front().labels[0] == "BB");
  CHECK(map.cells.back().labels[0] == "HH");
}

TEST_CASE("price-space map requires two banks") {
  Vec one = Vec::Constant(1, 1.0);
  const Network net = Network::validated(one, 8.0 * one, 8.0 * one, Mat::Zero(1, 1));
  CHECK_THROWS_AS(price_space_map(net, 0.0, 1.0, 4), SolverError);
}
