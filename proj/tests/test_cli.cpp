#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "lost3dsg/json_io.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using lost3dsg::Json;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("lost3dsg_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Run run(const std::string& args) {
  const fs::path err_file = fs::temp_directory_path() / "lost3dsg_cli_stderr.txt";
  const std::string cmd = std::string(LOST3DSG_CLI_PATH) + " " + args + " 2>" + err_file.string();
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err_file);
  return r;
}

std::string scenario(const std::string& file) { return oracle::data_path("scenarios/" + file); }

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

// One crate filling a unit cube, seen once.
std::string unit_cube_scenario(bool with_object) {
  Json det = Json::array();
  if (with_object) {
    det.push_back(Json{{"label", "crate"}, {"bbox3d", {{"min", {0, 0, 0}}, {"max", {1, 1, 1}}}}});
  }
  const Json doc{
      {"name", "cube"},
      {"rooms", Json::array()},
      {"supports", Json::array()},
      {"frames", Json::array({Json{
                     {"exploration", true},
                     {"pose", {{"rotation", {1, 0, 0, 0, 1, 0, 0, 0, 1}}, {"translation", {0, 0, -2}}}},
                     {"intrinsics", {{"fx", 50}, {"fy", 50}, {"cx", 32}, {"cy", 24}, {"width", 64}, {"height", 48}}},
                     {"detections", det}}})},
      {"ground_truth", Json::array()}};
  return doc.dump();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("replay writes a report and exits 0") {
  const fs::path dir = scratch("replay");
  const Run r = run("replay --scenario " + scenario("level1_easy.json") + " --out " + (dir / "r.json").string());
  CHECK(r.code == 0);
  CHECK(r.err.find("detections 3/3") != std::string::npos);
  const Json doc = Json::parse(slurp(dir / "r.json"));
  CHECK(doc["metrics"]["updates"]["achieved"] == 3);
  CHECK(doc["frames"].size() == 9);
}

TEST_CASE("output is byte-identical across runs") {
  const Run a = run("replay --scenario " + scenario("level3_hard.json"));
  const Run b = run("replay --scenario " + scenario("level3_hard.json"));
  CHECK(a.code == 0);
  CHECK_FALSE(a.out.empty());
  CHECK(a.out == b.out);
}

TEST_CASE("invalid input exits 2 with a diagnostic") {
  CHECK(run("").code == 2);
  CHECK(run("replay").code == 2);
  CHECK(run("frobnicate --scenario x").code == 2);

  const Run missing = run("replay --scenario /nonexistent/s.json");
  CHECK(missing.code == 2);
  CHECK(missing.err.find("/nonexistent/s.json") != std::string::npos);

  const fs::path dir = scratch("badcfg");
  write(dir / "cfg.json", R"({"weights": {"alpha": 0.15, "beta": 0.30, "gamma": 0.15, "delta": 0.30}})");
  const Run cfg = run("replay --scenario " + scenario("level1_easy.json") + " --config " + (dir / "cfg.json").string());
  CHECK(cfg.code == 2);
  CHECK(cfg.err.find("weights") != std::string::npos);

  CHECK(run("memory --scenario " + scenario("level1_easy.json") + " --voxel-res -1").code == 2);
  CHECK(run("replay --scenario " + scenario("level1_easy.json") + " --embedder cloud").code == 2);
}

TEST_CASE("ablate prints six rows") {
  const fs::path dir = scratch("ablate");
  const Run r = run("ablate --scenario " + oracle::data_path("scenarios") + " --out " + (dir / "a.json").string());
  REQUIRE(r.code == 0);
  const Json doc = Json::parse(slurp(dir / "a.json"));
  REQUIRE(doc["rows"].size() == 6);
  CHECK(doc["rows"][0]["components"] == "full");
  CHECK(doc["rows"][5]["components"] == "label");
  CHECK(doc["scenarios"].size() == 3);
  const std::string table = slurp(dir / "a.txt");
  CHECK(table.find("LSF components") == 0);
  CHECK(r.err == table);

  const Run custom = run("ablate --scenario " + oracle::data_path("scenarios") + " --ablate-subsets \"full;l\"");
  CHECK(custom.code == 0);
  CHECK(Json::parse(custom.out)["rows"].size() == 2);
}

TEST_CASE("ablate input errors") {
  const fs::path empty = scratch("ablate_empty");
  CHECK(run("ablate --scenario " + empty.string()).code == 2);
  CHECK(run("ablate --scenario " + scenario("level1_easy.json")).code == 2);

  const fs::path dir = scratch("ablate_broken");
  fs::copy_file(scenario("level1_easy.json"), dir / "a.json");
  write(dir / "b.json", "{ broken");
  const Run r = run("ablate --scenario " + dir.string());
  CHECK(r.code == 2);
  CHECK(r.err.find("b.json") != std::string::npos);
}

TEST_CASE("memory comparison") {
  const Run r = run("memory --scenario " + scenario("level2_medium.json") + " --voxels 626140");
  REQUIRE(r.code == 0);
  const Json doc = Json::parse(r.out);
  CHECK(doc["memory"]["object_count"] == 21);
  CHECK(doc["memory"]["object_bytes"] == 3297);
  CHECK(doc["memory"]["voxel_bytes"] == 641167360ull);
  CHECK(doc["voxel_count_source"] == "override");

  const fs::path dir = scratch("memory");
  write(dir / "cube.json", unit_cube_scenario(true));
  const Json cube = Json::parse(run("memory --scenario " + (dir / "cube.json").string() + " --voxel-res 0.025").out);
  CHECK(cube["memory"]["voxel_count"] == 64000);
  CHECK(cube["memory"]["voxel_bytes"] == 64000ull * 512 * 2);

  write(dir / "none.json", unit_cube_scenario(false));
  const Run none = run("memory --scenario " + (dir / "none.json").string());
  REQUIRE(none.code == 0);
  const Json z = Json::parse(none.out);
  CHECK(z["memory"]["object_bytes"] == 0);
  CHECK(z["memory"]["reduction"].is_null());
}

}  // TEST_SUITE
