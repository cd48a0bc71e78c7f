#pragma once

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "coconet/equilibrium.hpp"
#include "coconet/limits.hpp"
#include "coconet/network.hpp"
#include "coconet/partition.hpp"
#include "coconet/region.hpp"
#include "coconet/superfair.hpp"

namespace coconet {

/// JSON/CSV conventions: bank indices are 1-based in every file read or
/// written here; numbers are serialized with the shortest representation
/// that round-trips, so identical inputs give byte-identical outputs.

inline std::vector<double> to_std(const Vec& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline std::string format_number(double x) { return nlohmann::json(x).dump(); }

/// Parse a network from the object form
///   { "n": int, "m": [..], "c": [..], "l": [..] | "fair", "W": [[..]] }.
/// "l": "fair" sets every threshold to c_i / m_i, the level at which
/// conversion neither rewards nor punishes creditors. Shape problems throw
/// BadConfig; value problems throw the specific validation error.
inline Network load_network(const nlohmann::json& j) {
  int n = 0;
  Vec m, c, l;
  Mat W;
  try {
    n = j.at("n").get<int>();
    if (n <= 0) throw SolverError(ErrorCode::BadConfig, "\"n\" must be a positive integer");
    auto vec_field = [&](const char* name) {
      const auto values = j.at(name).get<std::vector<double>>();
      if (static_cast<int>(values.size()) != n)
        throw SolverError(ErrorCode::BadConfig,
                          std::string("\"") + name + "\" must have n = " + std::to_string(n) +
                              " entries, got " + std::to_string(values.size()));
      return Eigen::Map<const Vec>(values.data(), n).eval();
    };
    m = vec_field("m");
    c = vec_field("c");
    const auto& lj = j.at("l");
    if (lj.is_string()) {
      if (lj.get<std::string>() != "fair")
        throw SolverError(ErrorCode::BadConfig,
                          "\"l\" must be an array of thresholds or the string \"fair\"");
      l = c.cwiseQuotient(m);
    } else {
      l = vec_field("l");
    }
    const auto rows = j.at("W").get<std::vector<std::vector<double>>>();
    if (static_cast<int>(rows.size()) != n)
      throw SolverError(ErrorCode::BadConfig,
                        "\"W\" must have n = " + std::to_string(n) + " rows");
    W.resize(n, n);
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != n)
        throw SolverError(ErrorCode::BadConfig,
                          "row " + std::to_string(i + 1) + " of \"W\" must have n = " +
                              std::to_string(n) + " entries");
      for (int k = 0; k < n; ++k) W(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    }
  } catch (const nlohmann::json::exception& e) {
    throw SolverError(ErrorCode::BadConfig, std::string("network config: ") + e.what());
  }
  return Network::validated(std::move(m), std::move(c), std::move(l), std::move(W));
}

inline Network load_network_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw SolverError(ErrorCode::BadConfig, "cannot open network file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SolverError(ErrorCode::BadConfig, path + ": " + e.what());
  }
  return load_network(j);
}

inline nlohmann::json indices_1based(const std::vector<int>& banks) {
  nlohmann::json arr = nlohmann::json::array();
  for (int b : banks) arr.push_back(b + 1);
  return arr;
}

inline nlohmann::json to_json(const Partition& p) {
  return nlohmann::json{{"B", indices_1based(p.bankrupt())},
                        {"C", indices_1based(p.converting())},
                        {"H", indices_1based(p.healthy())}};
}

inline nlohmann::json to_json(const Equilibrium& eq) {
  nlohmann::json j = to_json(eq.partition);
  j["s"] = to_std(eq.s);
  j["residual"] = eq.residual;
  return j;
}

inline nlohmann::json to_json(const EquilibriumSet& es) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Equilibrium& eq : es.items) arr.push_back(to_json(eq));
  return nlohmann::json{{"count", es.count()}, {"equilibria", std::move(arr)}};
}

inline nlohmann::json to_json(const FairnessClass& fc, const Network& net) {
  nlohmann::json banks = nlohmann::json::array();
  for (int i = 0; i < net.n; ++i)
    banks.push_back(nlohmann::json{{"bank", i + 1},
                                   {"margin", fc.margin(i)},
                                   {"class", to_string(fc.bank[static_cast<std::size_t>(i)])}});
  return nlohmann::json{{"market", to_string(fc.market)}, {"banks", std::move(banks)}};
}

inline nlohmann::json mask_to_json(std::uint32_t mask, int n) {
  nlohmann::json arr = nlohmann::json::array();
  for (int i = 0; i < n; ++i)
    if (mask & (1u << i)) arr.push_back(i + 1);
  return arr;
}

inline nlohmann::json to_json(const FixedPointTrace& trace, int n) {
  nlohmann::json steps = nlohmann::json::array();
  for (int k = 0; k < trace.steps(); ++k) {
    steps.push_back(nlohmann::json{
        {"step", k},
        {"X", mask_to_json(trace.sets[static_cast<std::size_t>(k)], n)},
        {"shifted_a", to_std(trace.shifted_points[static_cast<std::size_t>(k)])},
        {"healthy", mask_to_json(trace.sets[static_cast<std::size_t>(k) + 1], n)}});
  }
  return nlohmann::json{{"steps", std::move(steps)},
                        {"fixed_point", mask_to_json(trace.fixed_point(), n)}};
}

inline void write_grid_csv(std::ostream& out, const GridMap& map) {
  const bool price = (map.space == GridSpace::Price);
  out << (price ? "s1,s2,count,labels" : "a1,a2,count,labels") << "\n";
  for (const GridCell& cell : map.cells) {
    out << format_number(cell.x) << "," << format_number(cell.y) << "," << cell.count << ",";
    for (std::size_t i = 0; i < cell.labels.size(); ++i) {
      if (i) out << ";";
      out << cell.labels[i];
    }
    out << "\n";
  }
}

inline void write_limits_csv(std::ostream& out, const std::vector<LimitRow>& rows, int n) {
  out << "m";
  for (int i = 0; i < n; ++i) out << ",v_" << (i + 1);
  out << ",dist_EN,dist_cancel\n";
  for (const LimitRow& row : rows) {
    out << format_number(row.m);
    for (int i = 0; i < n; ++i) out << "," << format_number(row.v(i));
    out << "," << format_number(row.dist_en) << "," << format_number(row.dist_cancel) << "\n";
  }
}

}  // namespace coconet
