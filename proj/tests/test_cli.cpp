#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "perc/cli.hpp"

using namespace perc;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "perc_cli_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("help and version") {
    CHECK(run({"--help"}).code == kExitOk);
    const auto v = run({"--version"});
    CHECK(v.code == kExitOk);
    CHECK_FALSE(v.out.empty());
    CHECK(run({}).code == kExitConfig);
  }

  TEST_CASE("crossing table") {
    const auto r = run({"crossing", "--kind", "cubic", "--k", "4,8", "--p-bond", "0.35", "--trials", "200", "--seed", "7"});
    REQUIRE(r.code == kExitOk);
    const auto rows = lines(r.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "kind,k,p_site,p_bond,axes,trials,P,stderr,seed");
    CHECK(rows[1].rfind("cubic,4,1,0.35,xy,200,", 0) == 0);
    CHECK(rows[2].rfind("cubic,8,1,0.35,xy,200,", 0) == 0);
    CHECK(rows[1].substr(rows[1].size() - 2) == ",7");
    const auto sweep = run({"crossing", "--kind", "cubic", "--k", "4", "--p", "0.2,0.3", "--trials", "50"});
    CHECK(lines(sweep.out).size() == 3);
    const auto full = run({"crossing", "--kind", "cubic", "--k", "4", "--p-bond", "1", "--trials", "20"});
    CHECK(lines(full.out)[1].find(",20,1,0,") != std::string::npos);
  }

  TEST_CASE("runs are deterministic and independent of the worker count") {
    const std::vector<std::string> base{"renorm", "--kind", "cubic", "--L", "2", "--k", "2,3", "--p-bond", "0.35",
                                        "--trials", "300", "--seed", "11"};
    auto three = base;
    three.insert(three.end(), {"--workers", "3"});
    const auto a = run(base), b = run(base), c = run(three);
    CHECK(a.code == kExitOk);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
    CHECK(lines(a.out)[0] == "kind,L,k,p_site,p_bond,trials,P,stderr,seed");
    auto other = base;
    other[other.size() - 1] = "12";
    CHECK(run(other).out != a.out);
  }

  TEST_CASE("configuration errors exit with code 2") {
    CHECK(run({"crossing", "--kind", "hexagon"}).code == kExitConfig);
    CHECK(run({"crossing", "--p-bond", "1.5"}).code == kExitConfig);
    CHECK(run({"crossing", "--trials", "abc"}).code == kExitConfig);
    CHECK(run({"crossing", "--kind", "pyrochlore", "--p-bond", "0.5"}).code == kExitConfig);
    CHECK(run({"renorm", "--kind", "cubic", "--L", "0"}).code == kExitConfig);
    CHECK(run({"bound", "--a", "-1"}).code == kExitConfig);
    CHECK(run({"frobnicate"}).code == kExitConfig);
    const auto e = run({"crossing", "--kind", "hexagon"});
    CHECK_FALSE(e.err.empty());
  }

  TEST_CASE("plan on a fully open instance verifies") {
    const auto path = scratch("open_plan.txt");
    const auto r = run({"plan", "--kind", "cubic", "--L", "4", "--k", "2", "--p-bond", "1", "--out", path.string()});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("verified: true") != std::string::npos);
    const auto plan = lines(slurp(path));
    std::size_t keep = 0;
    for (const auto& l : plan) keep += l.size() > 5 && l.substr(l.size() - 5) == " KEEP" ? 1 : 0;
    CHECK(keep == 16);
    CHECK(plan.size() == 16 * 16 * 8);
    const auto manifest = nlohmann::json::parse(slurp(path.string() + ".manifest.json"));
    CHECK(manifest["command"] == "plan");
    CHECK(manifest.contains("version"));
  }

  TEST_CASE("plan on a percolated instance") {
    // Scan streams for a full instance, then check that its plan verifies.
    bool found = false;
    for (int stream = 0; stream < 40 && !found; ++stream) {
      const auto r = run({"plan", "--kind", "cubic", "--L", "6", "--k", "4", "--p-bond", "0.4", "--seed", "5",
                          "--stream", std::to_string(stream), "--out", scratch("plan6.txt").string()});
      if (r.code == kExitNotFull) continue;
      found = true;
      CHECK(r.code == kExitOk);
      CHECK(r.out.find("verified: true") != std::string::npos);
    }
    CHECK(found);
  }

  TEST_CASE("plan reports missing sites") {
    const auto r = run({"plan", "--kind", "cubic", "--L", "2", "--k", "2", "--p-bond", "0"});
    CHECK(r.code == kExitNotFull);
    CHECK(r.err.find("verified: false") != std::string::npos);
    const auto allowed = run({"plan", "--kind", "cubic", "--L", "2", "--k", "2", "--p-bond", "0", "--allow-fail"});
    CHECK(allowed.code == kExitOk);
  }

  TEST_CASE("scaling summary") {
    const auto path = scratch("scaling.csv");
    const auto r = run({"scaling", "--kind", "diamond", "--p-site", "1", "--p-bond", "1", "--L", "2,4", "--trials", "10",
                        "--out", path.string()});
    REQUIRE(r.code == kExitOk);
    const auto rows = lines(slurp(path));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "kind,L,k_min,found,p_site,p_bond,threshold,trials,seed");
    CHECK(rows[1].rfind("diamond,2,1,", 0) == 0);
    CHECK(rows[2].rfind("diamond,4,1,", 0) == 0);
    CHECK(lines(slurp(path.string() + ".scan.csv"))[0] == "kind,L,k,P,stderr");
    const auto none = run({"scaling", "--kind", "diamond", "--p-site", "1", "--p-bond", "0", "--L", "2", "--k-max", "2",
                           "--trials", "10"});
    CHECK(lines(none.out)[1].rfind("diamond,2,NA,", 0) == 0);
  }

  TEST_CASE("bound table") {
    const auto r = run({"bound", "--L", "100,1e6"});
    REQUIRE(r.code == kExitOk);
    const auto rows = lines(r.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "L,k,full_bound,simplified_bound");
    CHECK(rows[2].rfind("1e+06,1000,1,", 0) == 0);
    CHECK(run({"bound", "--L", "100,1000", "--k", "20"}).code == kExitConfig);
  }

  TEST_CASE("loss table") {
    const auto r = run({"loss", "--kind", "diamond", "--L", "1", "--k", "2", "--p-site", "1", "--p-bond", "1",
                        "--p-loss", "0", "--trials", "20"});
    REQUIRE(r.code == kExitOk);
    const auto rows = lines(r.out);
    CHECK(rows[0] == "kind,L,k,n_states,n_qubits,p_site,p_bond,p_loss,P_cross,stderr,p_effective,site_failure");
    CHECK(rows[1].rfind("diamond,1,2,64,320,1,1,0,1,0,", 0) == 0);
  }

  TEST_CASE("output files match the printed tables") {
    const auto path = scratch("crossing.csv");
    const std::vector<std::string> args{"crossing", "--kind", "diamond", "--k", "2", "--p-site", "0.9",
                                        "--p-bond", "0.6", "--trials", "100"};
    auto with_out = args;
    with_out.insert(with_out.end(), {"--out", path.string()});
    const auto printed = run(args);
    const auto written = run(with_out);
    CHECK(written.code == kExitOk);
    CHECK(written.out.empty());
    CHECK(slurp(path) == printed.out);
    const auto manifest = nlohmann::json::parse(slurp(path.string() + ".manifest.json"));
    CHECK(manifest["command"] == "crossing");
  }
}
