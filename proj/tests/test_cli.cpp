#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#ifndef COCONET_CLI_PATH
#error "COCONET_CLI_PATH must point at the built CLI binary"
#endif

namespace {

using nlohmann::json;

struct CliResult {
  int exit_code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  const std::string command =
      env_prefix + std::string(COCONET_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult res;
  char buffer[4096];
  std::size_t got = 0;
  while ((got = fread(buffer, 1, sizeof(buffer), pipe)) > 0) res.out.append(buffer, got);
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string write_config(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << body;
  return path.string();
}

const std::string kFairNet = write_config("cli_fair.json", R"({
  "n": 2, "m": [1, 1], "c": [8, 8], "l": [8, 8],
  "W": [[0, 0.75], [0.75, 0]]
})");

const std::string kSuperFairNet = write_config("cli_superfair.json", R"({
  "n": 2, "m": [1, 1], "c": [4, 4], "l": [8, 8],
  "W": [[0, 0.75], [0.75, 0]]
})");

const std::string kSubFairNet = write_config("cli_subfair.json", R"({
  "n": 2, "m": [1, 1], "c": [12, 12], "l": [8, 8],
  "W": [[0, 0.75], [0.75, 0]]
})");

const std::string kAsymmetricNet = write_config("cli_asymmetric.json", R"({
  "n": 2, "m": [1, 1], "c": [3.5, 0.1], "l": [6, 6],
  "W": [[0, 0.6], [0.6, 0]]
})");

}  // namespace

TEST_CASE("validate accepts a clean config and reports bank count") {
  const CliResult res = run_cli("validate --net " + kFairNet);
  REQUIRE(res.exit_code == 0);
  const json j = json::parse(res.out);
  CHECK(j.at("valid") == true);
  CHECK(j.at("n") == 2);
}

TEST_CASE("validate surfaces model errors as JSON records with exit 1") {
  const std::string bad = write_config("cli_selfhold.json", R"({
    "n": 2, "m": [1, 1], "c": [8, 8], "l": [8, 8],
    "W": [[0.1, 0.75], [0.75, 0]]
  })");
  const CliResult res = run_cli("validate --net " + bad);
  CHECK(res.exit_code == 1);
  const json j = json::parse(res.out);
  CHECK(j.at("error").at("code") == "SelfHolding");
}

TEST_CASE("unparseable JSON exits 2 with nothing on stdout") {
  const std::string broken = write_config("cli_broken.json", "{ not json");
  const CliResult res = run_cli("validate --net " + broken);
  CHECK(res.exit_code == 2);
  CHECK(res.out.empty());
}

TEST_CASE("missing required flags exit 2") {
  const CliResult res = run_cli("solve --net " + kFairNet);
  CHECK(res.exit_code == 2);
}

TEST_CASE("classify reports per-bank margins and the market label") {
  const CliResult res = run_cli("classify --net " + kSuperFairNet);
  REQUIRE(res.exit_code == 0);
  const json j = json::parse(res.out);
  CHECK(j.at("market") == "super-fair");
  CHECK(j.at("banks").at(0).at("margin") == 4.0);
}

TEST_CASE("phi echoes the partition and asset level") {
  const CliResult res = run_cli("phi --net " + kFairNet + " --s 18,18");
  REQUIRE(res.exit_code == 0);
  const json j = json::parse(res.out);
  CHECK(j.at("a") == json({20.0, 20.0}));
  CHECK(j.at("partition").at("H") == json({1, 2}));
}

TEST_CASE("solve enumerates equilibria with 1-based blocks") {
  const CliResult res = run_cli("solve --net " + kFairNet + " --a 10,10");
  REQUIRE(res.exit_code == 0);
  const json j = json::parse(res.out);
  CHECK(j.at("method") == "enumerate");
  REQUIRE(j.at("count") == 1);
  CHECK(j.at("equilibria").at(0).at("C") == json({1, 2}));
  CHECK(j.at("equilibria").at(0).at("s").at(0) == 8.0);
}

TEST_CASE("solve --method fictitious reports its path") {
  const CliResult res = run_cli("solve --net " + kFairNet + " --a 5,20 --method fictitious");
  REQUIRE(res.exit_code == 0);
  const json j = json::parse(res.out);
  CHECK(j.at("method") == "fictitious");
  CHECK(j.at("path") == "iteration");
  CHECK(j.at("iterations").get<int>() <= 6);
  CHECK(j.at("equilibria").at(0).at("s").at(0) == 5.5);
}

TEST_CASE("solve --method superfair-fp resolves the asymmetric market") {
  const CliResult res =
      run_cli("solve --net " + kAsymmetricNet + " --a 8.5,20 --method superfair-fp");
  REQUIRE(res.exit_code == 0);
  const json j = json::parse(res.out);
  REQUIRE(j.at("count") == 1);
  const json& eq = j.at("equilibria").at(0);
  CHECK(eq.at("C") == json({1}));
  CHECK(eq.at("H") == json({2}));
  CHECK(eq.at("s").at(0).get<double>() == Catch::Approx(4.28).margin(1e-9));
  CHECK(eq.at("s").at(1).get<double>() == Catch::Approx(22.468).margin(1e-9));
}

TEST_CASE("witness emits an asset level with zero equilibria") {
  const CliResult res = run_cli("witness --net " + kSubFairNet + " --bank 1");
  REQUIRE(res.exit_code == 0);
  const json j = json::parse(res.out);
  CHECK(j.at("a") == json({9.0, 29.0}));
  CHECK(j.at("count") == 0);
}

TEST_CASE("witness on a fair bank is a solver error") {
  const CliResult res = run_cli("witness --net " + kFairNet + " --bank 1");
  CHECK(res.exit_code == 1);
  CHECK(json::parse(res.out).at("error").at("code") == "NotSubFair");
}

TEST_CASE("trace-fp walks the healthy-set iteration") {
  const CliResult res = run_cli("trace-fp --net " + kAsymmetricNet + " --a 8.5,20");
  REQUIRE(res.exit_code == 0);
  const json j = json::parse(res.out);
  CHECK(j.at("fixed_point") == json({2}));
  REQUIRE(j.at("steps").size() == 2);
  CHECK(j.at("steps").at(0).at("X") == json({1, 2}));
  CHECK(j.at("steps").at(1).at("X") == json({2}));
  CHECK(j.at("solution").at("H") == json({2}));
}

TEST_CASE("check runs the randomized self-checks") {
  const CliResult res = run_cli("check --net " + kFairNet + " --trials 50 --seed 7");
  REQUIRE(res.exit_code == 0);
  const json j = json::parse(res.out);
  CHECK(j.at("boundary").at("pass") == true);
  CHECK(j.at("inverse_nonneg").at("pass") == true);
  CHECK(j.at("sign_pattern").at("pass") == true);
  CHECK(j.at("diag_dominance").at("pass") == true);
  CHECK(j.at("shift_lemmas").at("violations") == 0);
}

TEST_CASE("identical invocations produce byte-identical output") {
  const std::string args = "check --net " + kSuperFairNet + " --trials 60 --seed 4242";
  const CliResult first = run_cli(args);
  const CliResult second = run_cli(args);
  REQUIRE(first.exit_code == 0);
  CHECK(first.out == second.out);

  const CliResult solve_a = run_cli("solve --net " + kSuperFairNet + " --a -6,16");
  const CliResult solve_b = run_cli("solve --net " + kSuperFairNet + " --a -6,16");
  CHECK(solve_a.out == solve_b.out);
  CHECK(json::parse(solve_a.out).at("count") == 2);
}

TEST_CASE("grid writes the overlap region as CSV") {
  const CliResult res =
      run_cli("grid --net " + kSuperFairNet + " --window -10,20 --res 31");
  REQUIRE(res.exit_code == 0);
  CHECK(res.out.rfind("a1,a2,count,labels\n", 0) == 0);
  CHECK(res.out.find("-6.0,16.0,2,CC;BH\n") != std::string::npos);
  int lines = 0;
  for (char ch : res.out) lines += (ch == '\n');
  CHECK(lines == 31 * 31 + 1);
}

TEST_CASE("grid --space price labels status cells") {
  const CliResult res =
      run_cli("grid --net " + kFairNet + " --window -4,12 --res 5 --space price");
  REQUIRE(res.exit_code == 0);
  CHECK(res.out.rfind("s1,s2,count,labels\n", 0) == 0);
  CHECK(res.out.find("-4.0,-4.0,1,BB\n") != std::string::npos);
  CHECK(res.out.find("12.0,12.0,1,HH\n") != std::string::npos);
}

TEST_CASE("limits sweeps the conversion ratio into both limits") {
  const CliResult res =
      run_cli("limits --net " + kFairNet + " --a 10,10 --m-grid 1e-6,1,1e6");
  REQUIRE(res.exit_code == 0);
  CHECK(res.out.rfind("m,v_1,v_2,dist_EN,dist_cancel\n", 0) == 0);
  CHECK(res.out.find("\n1.0,16.0,16.0,8.0,6.0\n") != std::string::npos);
  int lines = 0;
  for (char ch : res.out) lines += (ch == '\n');
  CHECK(lines == 4);
}

TEST_CASE("--out writes the same bytes to a file") {
  const auto out_path = std::filesystem::temp_directory_path() / "cli_solve_out.json";
  std::filesystem::remove(out_path);
  const CliResult direct = run_cli("solve --net " + kFairNet + " --a 10,10");
  const CliResult filed =
      run_cli("solve --net " + kFairNet + " --a 10,10 --out " + out_path.string());
  REQUIRE(filed.exit_code == 0);
  CHECK(filed.out.empty());
  std::ifstream in(out_path);
  std::string contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(contents == direct.out);
}

TEST_CASE("COCO_NET_NMAX caps the enumeration size") {
  const CliResult res =
      run_cli("solve --net " + kFairNet + " --a 10,10", "COCO_NET_NMAX=1 ");
  CHECK(res.exit_code == 1);
  CHECK(json::parse(res.out).at("error").at("code") == "TooManyBanks");
  const CliResult bad = run_cli("solve --net " + kFairNet + " --a 10,10", "COCO_NET_NMAX=zero ");
  CHECK(bad.exit_code == 2);
}
