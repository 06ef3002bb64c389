#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "shufflelab/io.hpp"
#include "shufflelab/lab.hpp"

using namespace shufflelab;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

RunResult run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  RunResult r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path fresh_dir(const std::string& tag) {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() /
                       ("shufflelab_cli_" + tag + "_" +
                        std::to_string(++counter));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream stream(path, std::ios::binary);
  REQUIRE(stream.good());
  std::ostringstream buffer;
  buffer << stream.rdbuf();
  return buffer.str();
}

json read_json(const fs::path& path) { return json::parse(slurp(path)); }

}  // namespace

TEST_CASE("obstruction example run passes with the documented defaults") {
  const fs::path dir = fresh_dir("obstruction");
  const RunResult r = run({"obstruction", "--n", "1,2,5,10", "--eps",
                           "0,0.5,1", "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(r.err.empty());
  const json report = read_json(dir / "obstruction_report.json");
  CHECK(report["verdict"] == "pass");
  CHECK(report["results"]["min_delta"].get<double>() >= 0.5 - 1e-12);
  const std::string csv = slurp(dir / "obstruction.csv");
  CHECK(csv.rfind("n,epsilon,delta,delta_bar\n", 0) == 0);
  // 4 n-values x 3 epsilons + header.
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 13);
}

TEST_CASE("obstruction with an unattainable floor fails its check") {
  const fs::path dir = fresh_dir("obstruction_floor");
  const RunResult r = run({"obstruction", "--n", "1,2", "--eps", "0",
                           "--floor", "0.9", "--out", dir.string()});
  CHECK(r.code == 2);
  const json report = read_json(dir / "obstruction_report.json");
  CHECK(report["verdict"] == "fail");
}

TEST_CASE("geometry accepts a scenario file and reports a zero shift for "
          "overlapping dominant sets") {
  const fs::path dir = fresh_dir("geometry");
  const fs::path scenario_path = dir / "overlap.json";
  {
    std::ofstream stream(scenario_path);
    stream << scenario_to_json(catalog_entry("two_dominant_overlap").scenario);
  }
  const RunResult r = run({"geometry", "--scenario", scenario_path.string(),
                           "--out", dir.string()});
  CHECK(r.code == 0);
  const json report = read_json(dir / "geometry_report.json");
  CHECK(report["verdict"] == "pass");
  CHECK(report["results"]["components"] == 1);
  CHECK(report["results"]["delta_shift_max_abs"].get<double>() <= 1e-12);
  CHECK(fs::exists(dir / "geometry.json"));
  const json geo = read_json(dir / "geometry.json");
  CHECK(geo.contains("levy_atoms"));
}

TEST_CASE("missing scenario file exits 1 naming the loading stage") {
  const fs::path dir = fresh_dir("missing");
  const RunResult r = run({"geometry", "--scenario",
                           (dir / "does_not_exist.json").string(), "--out",
                           dir.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("error[scenario loading]") != std::string::npos);
}

TEST_CASE("out-of-range prune exits 1 naming argument validation") {
  const fs::path dir = fresh_dir("badprune");
  const RunResult r = run({"transcript", "--n", "4", "--prune", "0.5",
                           "--out", dir.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("error[argument validation]") != std::string::npos);
  const RunResult r2 = run({"transcript", "--n", "4", "--tol", "0", "--out",
                            dir.string()});
  CHECK(r2.code == 1);
}

TEST_CASE("unknown option exits 1 via argument parsing") {
  const RunResult r = run({"catalog", "--no-such-flag"});
  CHECK(r.code == 1);
  CHECK(r.err.find("error[argument parsing]") != std::string::npos);
}

TEST_CASE("help exits 0 and prints the subcommand list") {
  const RunResult r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("obstruction") != std::string::npos);
  CHECK(r.out.find("boundary-be") != std::string::npos);
}

TEST_CASE("transcript writes the law and seeded samples deterministically") {
  const fs::path dir1 = fresh_dir("transcript1");
  const fs::path dir2 = fresh_dir("transcript2");
  const std::vector<std::string> base = {"transcript", "--scenario",
                                         "two_dominant_disjoint", "--n", "6",
                                         "--sample", "5", "--seed", "42"};
  auto with_out = [&](const fs::path& dir) {
    std::vector<std::string> args = base;
    args.push_back("--out");
    args.push_back(dir.string());
    return args;
  };
  const RunResult r1 = run(with_out(dir1));
  const RunResult r2 = run(with_out(dir2));
  REQUIRE(r1.code == 0);
  REQUIRE(r2.code == 0);

  const std::string law1 = slurp(dir1 / "transcript_law.csv");
  CHECK(law1.rfind("a,b,c,d,mass,deficit\n", 0) == 0);
  CHECK(law1 == slurp(dir2 / "transcript_law.csv"));
  const std::string samples1 = slurp(dir1 / "transcript_samples.csv");
  CHECK(samples1.rfind("a,b,c,d\n", 0) == 0);
  CHECK(samples1 == slurp(dir2 / "transcript_samples.csv"));
  // 5 sample rows + header.
  CHECK(std::count(samples1.begin(), samples1.end(), '\n') == 6);

  // A different seed must change the sample file but not the exact law.
  const fs::path dir3 = fresh_dir("transcript3");
  std::vector<std::string> reseeded = with_out(dir3);
  reseeded[8] = "43";
  REQUIRE(run(reseeded).code == 0);
  CHECK(slurp(dir3 / "transcript_law.csv") == law1);
  CHECK(slurp(dir3 / "transcript_samples.csv") != samples1);
}

TEST_CASE("privacy-curve writes one row per epsilon with error bars") {
  const fs::path dir = fresh_dir("curve");
  const RunResult r = run({"privacy-curve", "--scenario",
                           "two_dominant_disjoint", "--n", "16", "--eps",
                           "0,0.5,1", "--out", dir.string()});
  CHECK(r.code == 0);
  const std::string csv = slurp(dir / "privacy_curve.csv");
  CHECK(csv.rfind("epsilon,delta,delta_bar\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  const json report = read_json(dir / "privacy-curve_report.json");
  CHECK(report["verdict"] == "pass");
}

TEST_CASE("projected-rate parses geometric grids and passes on the default "
          "scenario") {
  const fs::path dir = fresh_dir("rate");
  const RunResult r = run({"projected-rate", "--scenario", "single_dominant",
                           "--n-grid", "8:64:2", "--out", dir.string(),
                           "--jobs", "2"});
  CHECK(r.code == 0);
  const json report = read_json(dir / "projected-rate_report.json");
  CHECK(report["grids"]["n"] == json::array({8, 16, 32, 64}));
  CHECK(report["results"]["null_fit"]["fitted"] == true);
  CHECK(report["results"]["null_fit"]["slope"].get<double>() <= -0.9);
  const std::string csv = slurp(dir / "projected_rate.csv");
  CHECK(csv.rfind("n,null_distance,null_distance_bar,alt_distance,"
                  "alt_distance_bar,total_distance,total_distance_bar\n",
                  0) == 0);
}

TEST_CASE("boundary-be writes coupling and gap tables and passes") {
  const fs::path dir = fresh_dir("boundary");
  const RunResult r = run({"boundary-be", "--c-grid", "0.4,0.2,0.1", "--eps",
                           "1", "--pi", "0.5", "--out", dir.string()});
  CHECK(r.code == 0);
  const std::string couplings = slurp(dir / "couplings.csv");
  CHECK(couplings.rfind("c,jitter_tv,jitter_tv_bar,rounding_tv,"
                        "rounding_tv_bar\n",
                        0) == 0);
  CHECK(std::count(couplings.begin(), couplings.end(), '\n') == 4);
  const std::string unit = slurp(dir / "gaps_unit_shift.csv");
  CHECK(std::count(unit.begin(), unit.end(), '\n') == 4);
  const std::string centered = slurp(dir / "gaps_centered_difference.csv");
  CHECK(std::count(centered.begin(), centered.end(), '\n') == 4);
  const json report = read_json(dir / "boundary-be_report.json");
  CHECK(report["verdict"] == "pass");
}

TEST_CASE("catalog lists every entry and honors SHUFFLELAB_OUT_DIR") {
  const fs::path dir = fresh_dir("catalog_env");
  REQUIRE(setenv("SHUFFLELAB_OUT_DIR", dir.string().c_str(), 1) == 0);
  const RunResult r = run({"catalog"});
  REQUIRE(unsetenv("SHUFFLELAB_OUT_DIR") == 0);
  CHECK(r.code == 0);
  const json listing = read_json(dir / "catalog.json");
  REQUIRE(listing.is_array());
  CHECK(listing.size() == catalog().size());
  bool found_obstruction = false;
  for (const json& entry : listing)
    if (entry["name"] == "obstruction") found_obstruction = true;
  CHECK(found_obstruction);
  CHECK(fs::exists(dir / "catalog_report.json"));
}

TEST_CASE("explicit --out takes precedence over the environment override") {
  const fs::path env_dir = fresh_dir("env_loses");
  const fs::path opt_dir = fresh_dir("opt_wins");
  REQUIRE(setenv("SHUFFLELAB_OUT_DIR", env_dir.string().c_str(), 1) == 0);
  const RunResult r = run({"catalog", "--out", opt_dir.string()});
  REQUIRE(unsetenv("SHUFFLELAB_OUT_DIR") == 0);
  CHECK(r.code == 0);
  CHECK(fs::exists(opt_dir / "catalog.json"));
  CHECK(!fs::exists(env_dir / "catalog.json"));
}

TEST_CASE("malformed grids are rejected during argument validation") {
  const fs::path dir = fresh_dir("grids");
  CHECK(run({"projected-rate", "--n-grid", "8:64", "--out", dir.string()})
            .code == 1);
  CHECK(run({"projected-rate", "--n-grid", "64,32,8", "--out", dir.string()})
            .code == 1);
  CHECK(run({"projected-rate", "--n-grid", "8,x,32", "--out", dir.string()})
            .code == 1);
  CHECK(run({"obstruction", "--eps", "1,0.5", "--out", dir.string()}).code ==
        1);
  CHECK(run({"boundary-be", "--c-grid", "0.4,1.5", "--out", dir.string()})
            .code == 1);
}
