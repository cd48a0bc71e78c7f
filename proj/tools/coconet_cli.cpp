// Command-line front end for the coconet equilibrium library.
//
// Conventions shared by every subcommand: bank indices are 1-based on the
// command line and in all output; vector-valued flags take comma-separated
// numbers; output is JSON (CSV for grid and limits) written to --out or
// stdout; the same inputs always produce byte-identical output. Exit codes:
// 0 success, 1 solver error (with a JSON error record on stdout), 2 bad
// invocation or unparseable config.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "coconet/coconet.hpp"

namespace {

using namespace coconet;
using nlohmann::json;

Vec parse_vector(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double x = std::stod(item, &used);
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size()) throw std::invalid_argument(item);
      values.push_back(x);
    } catch (const std::exception&) {
      throw SolverError(ErrorCode::BadConfig,
                        flag + ": cannot parse \"" + item + "\" as a number");
    }
  }
  if (values.empty())
    throw SolverError(ErrorCode::BadConfig, flag + ": expected comma-separated numbers");
  return Eigen::Map<const Vec>(values.data(), static_cast<Eigen::Index>(values.size())).eval();
}

SolveOptions options_from_env() {
  SolveOptions opt;
  if (const char* raw = std::getenv("COCO_NET_NMAX")) {
    try {
      std::size_t used = 0;
      const int n = std::stoi(raw, &used);
      if (used != std::string(raw).size() || n < 1) throw std::invalid_argument(raw);
      opt.n_max = n;
    } catch (const std::exception&) {
      throw SolverError(ErrorCode::BadConfig,
                        std::string("COCO_NET_NMAX: \"") + raw + "\" is not a positive integer");
    }
  }
  return opt;
}

void check_length(const Vec& v, const Network& net, const std::string& flag) {
  if (v.size() != net.n)
    throw SolverError(ErrorCode::BadConfig,
                      flag + ": expected " + std::to_string(net.n) + " entries, got " +
                          std::to_string(v.size()));
}

/// Writes to --out if given, else stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_)
        throw SolverError(ErrorCode::BadConfig, "cannot open output file: " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

void emit(const json& j, Sink& sink) { sink.stream() << j.dump(2) << "\n"; }

json boundary_to_json(const BoundaryReport& rep) {
  return json{{"market", to_string(rep.market)},
              {"trials", rep.trials},
              {"max_relative_discrepancy", rep.max_relative_discrepancy},
              {"tolerance", rep.tolerance},
              {"pass", rep.pass},
              {"jumps_recorded", static_cast<int>(rep.jumps.size())},
              {"max_jump_error", rep.max_jump_error}};
}

json equilibrium_with_method(const Equilibrium& eq, const char* method) {
  EquilibriumSet one;
  one.items.push_back(eq);
  json j = to_json(one);
  j["method"] = method;
  return j;
}

int run(int argc, char** argv) {
  CLI::App app{"Equilibrium stock prices in networks of banks holding each other's "
               "contingent convertible debt"};
  app.require_subcommand(1);

  std::string net_path, out_path;
  std::string a_text, s_text, method = "enumerate", window_text, space = "asset";
  std::string axes_text = "1,2", base_text, m_grid_text;
  int bank = 0, resolution = 0, trials = 200;
  std::uint64_t seed = 0;
  bool seed_given = false;

  auto add_net = [&](CLI::App* cmd) {
    cmd->add_option("--net", net_path, "network config (JSON)")->required();
    cmd->add_option("--out", out_path, "output file (default stdout)");
  };

  CLI::App* validate = app.add_subcommand("validate", "validate a network config");
  add_net(validate);

  CLI::App* classify = app.add_subcommand("classify", "per-bank and market fairness");
  add_net(classify);

  CLI::App* phi_cmd = app.add_subcommand("phi", "asset level that supports a price vector");
  add_net(phi_cmd);
  phi_cmd->add_option("--s", s_text, "price vector")->required();

  CLI::App* solve = app.add_subcommand("solve", "equilibria at an asset level");
  add_net(solve);
  solve->add_option("--a", a_text, "asset vector")->required();
  solve->add_option("--method", method, "enumerate | fictitious | superfair-fp")
      ->check(CLI::IsMember({"enumerate", "fictitious", "superfair-fp"}));

  CLI::App* witness = app.add_subcommand(
      "witness", "asset level with no equilibrium, for a sub-fair bank");
  add_net(witness);
  witness->add_option("--bank", bank, "sub-fair bank (1-based)")->required();

  CLI::App* trace = app.add_subcommand("trace-fp", "healthy-set fixed-point trace");
  add_net(trace);
  trace->add_option("--a", a_text, "asset vector")->required();

  CLI::App* check = app.add_subcommand("check", "randomized structure self-checks");
  add_net(check);
  check->add_option("--trials", trials, "draws per check")->check(CLI::PositiveNumber);
  check->add_option("--seed", seed, "RNG seed")->required();
  check->callback([&] { seed_given = true; });

  CLI::App* grid = app.add_subcommand("grid", "equilibrium regions over a coordinate plane");
  add_net(grid);
  grid->add_option("--window", window_text, "lo,hi for both axes")->required();
  grid->add_option("--res", resolution, "points per axis")->required()->check(CLI::PositiveNumber);
  grid->add_option("--space", space, "asset | price")
      ->check(CLI::IsMember({"asset", "price"}));
  grid->add_option("--axes", axes_text, "two swept banks, 1-based (default 1,2)");
  grid->add_option("--base", base_text, "values for the remaining coordinates");

  CLI::App* limits = app.add_subcommand("limits", "equity solutions along a conversion-ratio sweep");
  add_net(limits);
  limits->add_option("--a", a_text, "asset vector")->required();
  limits->add_option("--m-grid", m_grid_text, "conversion ratios to sweep")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << e.what() << "\n";
    return 2;
  }

  Sink sink(out_path);
  const SolveOptions opt = options_from_env();
  const Network net = load_network_file(net_path);

  if (validate->parsed()) {
    emit(json{{"valid", true}, {"n", net.n}}, sink);
  } else if (classify->parsed()) {
    emit(to_json(classify_fairness(net), net), sink);
  } else if (phi_cmd->parsed()) {
    const Vec s = parse_vector(s_text, "--s");
    check_length(s, net, "--s");
    emit(json{{"s", to_std(s)},
              {"partition", to_json(partition_of(s, net))},
              {"a", to_std(phi(s, net))}},
         sink);
  } else if (solve->parsed()) {
    const Vec a = parse_vector(a_text, "--a");
    check_length(a, net, "--a");
    if (method == "enumerate") {
      json j = to_json(enumerate_equilibria(a, net, opt));
      j["method"] = "enumerate";
      emit(j, sink);
    } else if (method == "fictitious") {
      const FictitiousResult res = fictitious_conversion(a, net, opt);
      json j = equilibrium_with_method(res.eq, "fictitious");
      j["path"] = to_string(res.path);
      j["iterations"] = res.iterations;
      emit(j, sink);
    } else {
      const Equilibrium eq = superfair_solve(a, net, opt);
      emit(equilibrium_with_method(eq, "superfair-fp"), sink);
    }
  } else if (witness->parsed()) {
    if (bank < 1 || bank > net.n)
      throw SolverError(ErrorCode::BadConfig,
                        "--bank: expected a 1-based index up to " + std::to_string(net.n));
    const AssetVector a = subfair_witness(bank - 1, net);
    json j{{"bank", bank}, {"a", to_std(a)}};
    if (net.n <= opt.n_max) j["count"] = enumerate_equilibria(a, net, opt).count();
    emit(j, sink);
  } else if (trace->parsed()) {
    const Vec a = parse_vector(a_text, "--a");
    check_length(a, net, "--a");
    const SuperFairDecomposition dec = decompose(net);
    json j = to_json(fixed_point_iterate(a, dec, opt), net.n);
    j["solution"] = to_json(superfair_solve(a, net, opt));
    emit(j, sink);
  } else if (check->parsed()) {
    (void)seed_given;
    json j;
    j["boundary"] = boundary_to_json(boundary_consistency_check(net, trials, seed));
    const InverseNonnegReport inv = check_inverse_nonneg(net.W);
    j["inverse_nonneg"] =
        json{{"pass", inv.pass}, {"min_entry", inv.min_entry}, {"rcond", inv.rcond}};
    Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
    bool sign_pass = true, dom_pass = true;
    double min_diag = std::numeric_limits<double>::infinity();
    double max_off = -std::numeric_limits<double>::infinity();
    double min_margin = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
      const Partition p = random_partition(rng, net.n);
      const SignPatternReport sp = check_sign_pattern(p, net);
      sign_pass = sign_pass && sp.pass;
      min_diag = std::min(min_diag, sp.min_diagonal);
      max_off = std::max(max_off, sp.max_offdiagonal);
      const DiagDominanceReport dd = check_diag_dominance(p, net);
      dom_pass = dom_pass && dd.pass;
      min_margin = std::min(min_margin, dd.min_margin);
    }
    j["sign_pattern"] = json{{"trials", trials},
                             {"pass", sign_pass},
                             {"min_diagonal", min_diag},
                             {"max_offdiagonal", max_off}};
    j["diag_dominance"] =
        json{{"trials", trials}, {"pass", dom_pass}, {"min_margin", min_margin}};
    if (classify_fairness(net).market != FairLabel::SubFair) {
      const ShiftLemmaReport rep =
          shift_lemma_checks(decompose(net), trials, seed ^ 0xda3e39cb94b95bdbull, opt);
      j["shift_lemmas"] = json{{"trials", rep.trials},
                               {"violations", rep.total_violations()},
                               {"containment_checked", rep.containment_checked},
                               {"foothold_checked", rep.foothold_checked},
                               {"sandwich_checked",
                                rep.sandwich_start_checked + rep.sandwich_second_checked +
                                    rep.sandwich_odd_checked + rep.sandwich_even_checked}};
    } else {
      j["shift_lemmas"] = nullptr;  // needs a fair-plus-shift decomposition
    }
    emit(j, sink);
  } else if (grid->parsed()) {
    const Vec window = parse_vector(window_text, "--window");
    if (window.size() != 2 || !(window(0) < window(1)))
      throw SolverError(ErrorCode::BadConfig, "--window: expected lo,hi with lo < hi");
    GridMap map;
    if (space == "price") {
      map = price_space_map(net, window(0), window(1), resolution);
    } else {
      const Vec axes = parse_vector(axes_text, "--axes");
      if (axes.size() != 2)
        throw SolverError(ErrorCode::BadConfig, "--axes: expected two 1-based indices");
      Vec base;
      if (!base_text.empty()) {
        base = parse_vector(base_text, "--base");
        check_length(base, net, "--base");
      }
      map = grid_map(net, window(0), window(1), resolution,
                     static_cast<int>(axes(0)) - 1, static_cast<int>(axes(1)) - 1, base, opt);
    }
    write_grid_csv(sink.stream(), map);
  } else if (limits->parsed()) {
    const Vec a = parse_vector(a_text, "--a");
    check_length(a, net, "--a");
    const Vec grid_values = parse_vector(m_grid_text, "--m-grid");
    const std::vector<double> m_grid(grid_values.data(), grid_values.data() + grid_values.size());
    write_limits_csv(sink.stream(), limit_convergence_check(a, net, m_grid, opt), net.n);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const SolverError& e) {
    if (e.code() == ErrorCode::BadConfig) {
      std::cerr << e.what() << "\n";
      return 2;
    }
    std::cout << json{{"error", {{"code", to_string(e.code())}, {"message", e.what()}}}}.dump(2)
              << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 2;
  }
}
