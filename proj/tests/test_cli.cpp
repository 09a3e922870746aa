// End-to-end tests of the command-line tool: exit-code contract, report
// schema, determinism, environment and config-file precedence.

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include "json.hpp"

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

std::string cli_path() {
  const char* p = std::getenv("CAPINDEX_BIN");
  REQUIRE(p != nullptr);
  return p;
}

RunResult run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + cli_path() + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  std::array<char, 4096> buf;
  while (std::size_t got = std::fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

}  // namespace

TEST_CASE("index: catenoid constrained indices") {
  const auto r = run("index --surface catenoid --constraints typeI,typeII --grid-n 128");
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["schema"] == 1);
  CHECK(j["mi_q"] == 4);
  CHECK(j["constraints"]["typeI"]["constrained_index"] == 3);
  CHECK(j["constraints"]["typeII"]["constrained_index"] == 3);
  CHECK(j["type_i_ii_interval"][0] == 3);
  CHECK(j["type_i_ii_interval"][1] == 3);
}

TEST_CASE("index: cylinder classification present") {
  const auto r = run("index --surface cylinder --n 2 --r 0.6 --constraints typeI --grid-n 128");
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["classification"] == "reduced");
  CHECK(j["constraints"]["typeI"]["offset"] == -1);
}

TEST_CASE("exit 1 on out-of-range and config errors") {
  CHECK(run("index --surface cylinder --r 1.5").exit_code == 1);
  CHECK(run("index --surface nosuch --r 0.5").exit_code == 1);
  CHECK(run("index --surface cylinder --r 0.5 --constraints weird").exit_code == 1);
  CHECK(run("index --surface cylinder --r 0.5 --grid-n 8").exit_code == 1);
  CHECK(run("sweep --r-min 0.9 --r-max 0.1 --steps 3").exit_code == 1);
}

TEST_CASE("roots table") {
  const auto r = run("roots --equation coth");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.rfind("root,residual\n", 0) == 0);
  CHECK(r.out.find("1.19967864026") != std::string::npos);
  const auto rc = run("roots --equation cot --range-max 7");
  CHECK(rc.out.find("2.79838604578") != std::string::npos);
  CHECK(rc.out.find("6.1212504669") != std::string::npos);
  const auto rt = run("roots --equation tan --range-max 5");
  CHECK(rt.out.find("4.49340945791") != std::string::npos);
}

TEST_CASE("reports are byte-identical across invocations") {
  const auto a = run("index --surface catenoid --constraints typeI --grid-n 128");
  const auto b = run("index --surface catenoid --constraints typeI --grid-n 128");
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("sweep csv matches index at a single radius") {
  const auto sw = run("sweep --n 2 --r-min 0.6 --r-max 0.6 --steps 1 --format csv --grid-n 128");
  REQUIRE(sw.exit_code == 0);
  REQUIRE(sw.out.rfind("r,mi_q,typeI,classification,a,b,c\n", 0) == 0);
  const auto ix = run("index --surface cylinder --n 2 --r 0.6 --constraints typeI --grid-n 128");
  const auto j = nlohmann::json::parse(ix.out);
  const std::string row = sw.out.substr(sw.out.find('\n') + 1);
  CHECK(row.find(",4,3,reduced,") != std::string::npos);
  CHECK(j["mi_q"] == 4);
  CHECK(j["constraints"]["typeI"]["constrained_index"] == 3);
}

TEST_CASE("csv format of index flattens the same values") {
  const auto r = run("index --surface catenoid --constraints typeI --grid-n 128 --format csv");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.rfind("key,value\n", 0) == 0);
  CHECK(r.out.find("mi_q,4") != std::string::npos);
  CHECK(r.out.find("constraints.typeI.constrained_index,3") != std::string::npos);
}

TEST_CASE("environment default and flag precedence") {
  const auto env = run("index --surface catenoid --constraints typeI", "CAPINDEX_GRID_N=128");
  REQUIRE(env.exit_code == 0);
  CHECK(nlohmann::json::parse(env.out)["grid_n"] == 128);
  const auto flag = run("index --surface catenoid --constraints typeI --grid-n 256",
                        "CAPINDEX_GRID_N=128");
  CHECK(nlohmann::json::parse(flag.out)["grid_n"] == 256);
}

TEST_CASE("config file keys, flag precedence, unknown-key rejection") {
  const std::string path = "/tmp/capindex_cli_cfg.json";
  {
    std::ofstream f(path);
    f << R"({"grid_n": 128, "constraints": "typeI"})";
  }
  const auto r = run("index --surface catenoid --config " + path);
  REQUIRE(r.exit_code == 0);
  CHECK(nlohmann::json::parse(r.out)["grid_n"] == 128);

  const auto over = run("index --surface catenoid --grid-n 256 --config " + path);
  CHECK(nlohmann::json::parse(over.out)["grid_n"] == 256);

  {
    std::ofstream f(path);
    f << R"({"grid_n": 128, "wrong_key": 3})";
  }
  CHECK(run("index --surface catenoid --config " + path).exit_code == 1);
}

TEST_CASE("verify subcommand reports per-criterion lines") {
  const auto r = run("verify");
  CHECK(r.exit_code == 1);  // the documented red criterion keeps this nonzero
  CHECK(r.out.find("PASS 1-catenoid-mi") != std::string::npos);
  CHECK(r.out.find("PASS 3-root-anchors") != std::string::npos);
  CHECK(r.out.find("FAIL 4-cylinder-window") != std::string::npos);
  CHECK(r.out.find("PASS 10-torus") != std::string::npos);

  const auto coarse = run("verify --grid-n 8");
  CHECK(coarse.exit_code == 1);
  CHECK(coarse.out.find("grid_n must be >= 64") != std::string::npos);
}

TEST_CASE("output file writing") {
  const std::string path = "/tmp/capindex_cli_out.json";
  std::remove(path.c_str());
  const auto r = run("index --surface torus --a 0.7071067811865476 --constraints closedWeak "
                     "--grid-n 128 --output " + path);
  REQUIRE(r.exit_code == 0);
  std::ifstream in(path);
  REQUIRE(in.good());
  nlohmann::json j;
  in >> j;
  CHECK(j["mi_q"] == 5);
  CHECK(j["constraints"]["closedWeak"]["constrained_index"] == 4);
}
