#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "coconet/equilibrium.hpp"
#include "coconet/forward_map.hpp"
#include "coconet/network.hpp"

namespace coconet {

enum class GridSpace { Asset, Price };

struct GridCell {
  double x = 0.0;
  double y = 0.0;
  int count = 0;
  std::vector<std::string> labels;  // partition label per equilibrium
};

/// A rectangular sweep over a coordinate plane. In Asset space each cell
/// holds the full equilibrium multiplicity at that asset level; in Price
/// space each cell is a single price vector and its partition label.
struct GridMap {
  GridSpace space = GridSpace::Asset;
  double lo = 0.0;
  double hi = 0.0;
  int resolution = 0;
  int axis1 = 0;
  int axis2 = 1;
  Vec base;
  /// Row-major with axis1 slow and axis2 fast:
  /// cells[i * resolution + j] has x = grid[i], y = grid[j].
  std::vector<GridCell> cells;
};

namespace detail {

inline double grid_value(double lo, double hi, int resolution, int k) {
  if (resolution == 1) return lo;
  return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(resolution - 1);
}

}  // namespace detail

/// Equilibrium count and partition labels over a plane of asset vectors:
/// coordinates axis1/axis2 sweep [lo, hi], [lo, hi], the remaining
/// coordinates stay at `base` (zero if empty).
inline GridMap grid_map(const Network& net, double lo, double hi, int resolution,
                        int axis1 = 0, int axis2 = 1, Vec base = Vec(),
                        const SolveOptions& opt = {}) {
  if (resolution < 1)
    throw SolverError(ErrorCode::BadConfig, "grid resolution must be at least 1");
  if (axis1 < 0 || axis1 >= net.n || axis2 < 0 || axis2 >= net.n || axis1 == axis2)
    throw SolverError(ErrorCode::BadConfig,
                      "grid axes must be two distinct bank indices below n");
  if (base.size() == 0) base = Vec::Zero(net.n);
  if (base.size() != net.n)
    throw SolverError(ErrorCode::DimensionMismatch,
                      "base vector has " + std::to_string(base.size()) + " entries, network has " +
                          std::to_string(net.n));
  GridMap map;
  map.space = GridSpace::Asset;
  map.lo = lo;
  map.hi = hi;
  map.resolution = resolution;
  map.axis1 = axis1;
  map.axis2 = axis2;
  map.base = base;
  map.cells.reserve(static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution));
  AssetVector a = base;
  for (int i = 0; i < resolution; ++i) {
    a(axis1) = detail::grid_value(lo, hi, resolution, i);
    for (int j = 0; j < resolution; ++j) {
      a(axis2) = detail::grid_value(lo, hi, resolution, j);
      const EquilibriumSet es = enumerate_equilibria(a, net, opt);
      GridCell cell;
      cell.x = a(axis1);
      cell.y = a(axis2);
      cell.count = es.count();
      for (const Equilibrium& eq : es.items) cell.labels.push_back(eq.partition.label());
      map.cells.push_back(std::move(cell));
    }
  }
  return map;
}

/// Partition label of every price vector on a plane: which status cell
/// each point falls in. Two-bank networks only; this is the forward view
/// whose image under phi produces the asset-space regions.
inline GridMap price_space_map(const Network& net, double lo, double hi, int resolution) {
  if (net.n != 2)
    throw SolverError(ErrorCode::BadConfig,
                      "price-space map is defined for two-bank networks, got n = " +
                          std::to_string(net.n));
  if (resolution < 1)
    throw SolverError(ErrorCode::BadConfig, "grid resolution must be at least 1");
  GridMap map;
  map.space = GridSpace::Price;
  map.lo = lo;
  map.hi = hi;
  map.resolution = resolution;
  map.base = Vec::Zero(2);
  map.cells.reserve(static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution));
  PriceVector s(2);
  for (int i = 0; i < resolution; ++i) {
    s(0) = detail::grid_value(lo, hi, resolution, i);
    for (int j = 0; j < resolution; ++j) {
      s(1) = detail::grid_value(lo, hi, resolution, j);
      GridCell cell;
      cell.x = s(0);
      cell.y = s(1);
      cell.count = 1;
      cell.labels.push_back(partition_of(s, net).label());
      map.cells.push_back(std::move(cell));
    }
  }
  return map;
}

struct OverlapSummary {
  /// count -> number of cells with that equilibrium count.
  std::map<int, long> histogram;
  /// Unordered label pairs that coexist in some multi-equilibrium cell.
  std::set<std::pair<std::string, std::string>> coexisting;
};

inline OverlapSummary overlap_summary(const GridMap& map) {
  OverlapSummary out;
  for (const GridCell& cell : map.cells) {
    out.histogram[cell.count]++;
    for (std::size_t i = 0; i < cell.labels.size(); ++i)
      for (std::size_t j = i + 1; j < cell.labels.size(); ++j) {
        std::pair<std::string, std::string> pr(cell.labels[i], cell.labels[j]);
        if (pr.second < pr.first) std::swap(pr.first, pr.second);
        out.coexisting.insert(std::move(pr));
      }
  }
  return out;
}

}  // namespace coconet
