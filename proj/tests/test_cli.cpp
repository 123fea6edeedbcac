#include "emdim/config.hpp"
#include "emdim/driver.hpp"
#include "emdim/error.hpp"
#include "support.hpp"

#include <doctest.h>
#include <json.hpp>

#include <sstream>

using namespace emdim;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "emdim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

const char* kSmallTc1 = R"([case]
name = tc1
radius = 0.01
[mesh]
h_far = 0.25
h_near = 0.05
band = 0.05
[graph]
segments = 20
[sweep]
radii = 0.02 0.01 0.005
)";

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

ErrorKind config_error(const std::string& text, std::string* message = nullptr) {
  try {
    parse(text);
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.kind();
  }
  FAIL("config accepted: " << text);
  return ErrorKind::Io;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config parsing") {
  const RunConfig c = parse(kSmallTc1);
  CHECK(c.case_name == "tc1");
  CHECK(c.h_far == 0.25);
  CHECK(c.segments == 20);
  CHECK(c.radii == std::vector<double>{0.02, 0.01, 0.005});
  CHECK(c.solver.tol == 1e-10);

  std::string msg;
  CHECK(config_error("[case]\nbogus = 1\n", &msg) == ErrorKind::Config);
  CHECK(msg.find("case.bogus") != std::string::npos);
  CHECK(config_error("[mesh]\nh_far = -1\n", &msg) == ErrorKind::Config);
  CHECK(msg.find("mesh.h_far") != std::string::npos);
  CHECK(config_error("[solver]\ntol = 1.5\n", &msg) == ErrorKind::Config);
  CHECK(msg.find("solver.tol") != std::string::npos);
  CHECK(config_error("[solver]\ntol = 0\n") == ErrorKind::Config);
  CHECK(config_error("[solver]\nprecond = jacobi\n") == ErrorKind::Config);
  CHECK(config_error("[graph]\nsegments = many\n") == ErrorKind::Config);
  CHECK(config_error("[nosuch]\nx = 1\n") == ErrorKind::Config);
  CHECK(config_error("radius = 1\n") == ErrorKind::Config);
}

TEST_CASE("effective config round trip") {
  RunConfig c = parse(kSmallTc1);
  c.solver.shift = 1e-9;
  c.tree.seed = 77;
  const std::string ini = to_ini(c);
  CHECK(to_ini(parse(ini)) == ini);
  CHECK(to_ini(default_config()) == to_ini(parse("")));
}

TEST_CASE("run writes the summary and is deterministic") {
  const auto dir = test::scratch_dir("cli_run");
  test::spit(dir / "c.ini", kSmallTc1);
  const auto a = cli({"run", "--config", (dir / "c.ini").string(), "--out", (dir / "a").string(), "--threads", "1"});
  REQUIRE(a.code == 0);
  const auto b = cli({"run", "--config", (dir / "c.ini").string(), "--out", (dir / "b").string()});
  REQUIRE(b.code == 0);
  for (const char* f : {"errors.csv", "fields.vtk", "graph.vtk", "effective.ini"}) {
    CHECK(fs::exists(dir / "a" / f));
    CHECK(test::slurp(dir / "a" / f) == test::slurp(dir / "b" / f));
  }
  const auto summary = nlohmann::json::parse(test::slurp(dir / "a" / "summary.json"));
  CHECK(summary.contains("l2_error"));
  CHECK(summary["l2_error"].is_number());
  CHECK(summary["iterations"].is_number_integer());
  CHECK(summary["slope"].is_null());
  CHECK(summary["solver"]["converged"] == true);
  CHECK(summary["config"]["case"]["name"] == "tc1");
  const std::string csv = test::slurp(dir / "a" / "errors.csv");
  CHECK(csv.rfind("R,error,iterations,residual\n", 0) == 0);

  // rerunning from the echoed configuration reproduces the table
  const auto c = cli({"run", "--config", (dir / "a" / "effective.ini").string(), "--out", (dir / "c").string()});
  REQUIRE(c.code == 0);
  CHECK(test::slurp(dir / "c" / "errors.csv") == csv);
}

TEST_CASE("exit codes") {
  const auto dir = test::scratch_dir("cli_exit");
  CHECK(cli({"run", "--config", (dir / "missing.ini").string(), "--out", dir.string()}).code == 1);
  test::spit(dir / "bad.ini", "[case]\nbogus = 1\n");
  const auto bad = cli({"run", "--config", (dir / "bad.ini").string(), "--out", dir.string()});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("case.bogus") != std::string::npos);
  CHECK(cli({"frobnicate"}).code == 1);

  test::spit(dir / "slow.ini", std::string(kSmallTc1) + "[solver]\nmax_iter = 3\nprecond = none\n");
  const auto slow = cli({"run", "--config", (dir / "slow.ini").string(), "--out", (dir / "slow").string()});
  CHECK(slow.code == 2);
  CHECK(nlohmann::json::parse(test::slurp(dir / "slow" / "summary.json"))["converged"] == false);

  test::spit(dir / "one.ini", std::string(kSmallTc1) + "[sweep]\nradii = 0.01\n");
  CHECK(cli({"sweep", "--config", (dir / "one.ini").string(), "--out", dir.string()}).code == 1);
}

TEST_CASE("sweep") {
  const auto dir = test::scratch_dir("cli_sweep");
  test::spit(dir / "c.ini", kSmallTc1);
  const auto r = cli({"sweep", "--config", (dir / "c.ini").string(), "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto summary = nlohmann::json::parse(test::slurp(dir / "summary.json"));
  CHECK(summary["slope"].get<double>() == doctest::Approx(1.0).epsilon(0.2));
  std::istringstream csv(test::slurp(dir / "errors.csv"));
  std::string line;
  std::getline(csv, line);
  std::vector<std::pair<double, double>> rows;
  while (std::getline(csv, line)) {
    std::istringstream fields(line);
    std::string r_text, e_text;
    std::getline(fields, r_text, ',');
    std::getline(fields, e_text, ',');
    rows.emplace_back(std::stod(r_text), std::stod(e_text));
  }
  REQUIRE(rows.size() == 3);
  for (size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].second > 0);
    if (i > 0) CHECK(rows[i].second < rows[i - 1].second);
  }
}

TEST_CASE("gen and verify") {
  const auto dir = test::scratch_dir("cli_gen");
  test::spit(dir / "cube.ini", "[case]\nname = tc1\n[mesh]\nh_far = 0.5\nh_near = 0.5\nband = 0.1\n");
  const auto cube = cli({"gen", "--config", (dir / "cube.ini").string(), "--out", (dir / "cube").string()});
  REQUIRE(cube.code == 0);
  CHECK(cube.out.find("volume: 1\n") != std::string::npos);
  CHECK(test::slurp(dir / "cube" / "mesh.emdim").rfind("EMDIM-MESH 1", 0) == 0);

  test::spit(dir / "tree.ini", "[case]\nname = tc3\n[tree]\ndepth = 1\n");
  const auto tree = cli({"gen", "--config", (dir / "tree.ini").string(), "--out", (dir / "tree").string()});
  REQUIRE(tree.code == 0);
  const auto net = read_graph((dir / "tree" / "graph.emdim").string());
  CHECK(net.num_nodes() == 2);
  CHECK(net.num_edges() == 1);

  test::spit(dir / "tc3.ini", "[case]\nname = tc3\n");
  const auto first = cli({"gen", "--config", (dir / "tc3.ini").string(), "--out", (dir / "g1").string(), "--seed", "3"});
  const auto second = cli({"gen", "--config", (dir / "tc3.ini").string(), "--out", (dir / "g2").string(), "--seed", "3"});
  REQUIRE(first.code == 0);
  REQUIRE(second.code == 0);
  CHECK(test::slurp(dir / "g1" / "graph.emdim") == test::slurp(dir / "g2" / "graph.emdim"));
  CHECK(test::slurp(dir / "g1" / "mesh.emdim") == test::slurp(dir / "g2" / "mesh.emdim"));
  const auto other = cli({"gen", "--config", (dir / "tc3.ini").string(), "--out", (dir / "g3").string(), "--seed", "4"});
  CHECK(test::slurp(dir / "g1" / "graph.emdim") != test::slurp(dir / "g3" / "graph.emdim"));

  test::spit(dir / "v.ini", kSmallTc1);
  const auto v = cli({"verify", "--config", (dir / "v.ini").string(), "--out", (dir / "v").string()});
  CHECK(v.code == 0);
  CHECK(nlohmann::json::parse(test::slurp(dir / "v" / "summary.json"))["passed"] == true);
}

}  // TEST_SUITE
