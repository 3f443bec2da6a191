#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "well_echo/output.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(WELL_ECHO_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch() {
  auto dir = fs::temp_directory_path() / "well_echo_cli_test";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("snapshot writes a CSV with the header") {
  const auto out = scratch() / "snap.csv";
  fs::remove(out);
  CHECK(run("snapshot --lambda 1.5 --time 1/4 --grid 240 --detect plateaux --out " +
            out.string()) == 0);
  REQUIRE(fs::exists(out));
  std::ifstream in(out);
  const auto t = well::read_csv(in);
  CHECK(t.rows() == 241);
  bool has_lambda = false;
  for (const auto& [k, v] : t.meta) has_lambda |= (k == "lambda" && v == "1.5");
  CHECK(has_lambda);
}

TEST_CASE("CSV and JSON of the same run carry the same values and header") {
  const auto csv = scratch() / "same.csv";
  const auto json = scratch() / "same.json";
  const std::string args = "snapshot --lambda 2.5 --time 3/8 --grid 300 --out ";
  REQUIRE(run(args + csv.string()) == 0);
  REQUIRE(run(args + json.string() + " --format json") == 0);
  std::ifstream a(csv), b(json);
  const auto ta = well::read_csv(a);
  const auto tb = well::read_json(b);
  CHECK(ta.names == tb.names);
  for (const auto& name : ta.names) {
    CHECK(ta.column(name) == tb.column(name));
  }
  CHECK(ta.meta == tb.meta);
  for (const char* key : {"lambda", "time", "n_max", "error_bound", "version"}) {
    bool found = false;
    for (const auto& [k, v] : ta.meta) found |= k == key;
    CHECK_MESSAGE(found, key);
  }
}

TEST_CASE("several times give one file each") {
  const auto stem = scratch() / "multi";
  CHECK(run("snapshot --lambda 2.5 --time 1/8 --time 1/4 --format json --grid 100 --out " +
            stem.string()) == 0);
  CHECK(fs::exists(scratch() / "multi_1-8.json"));
  CHECK(fs::exists(scratch() / "multi_1-4.json"));
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run("snapshot --lambda 0.5 --time 1/4") == 2);
  CHECK(run("snapshot --lambda 1.5 --time 1/0") == 2);
  CHECK(run("snapshot --bogus") == 2);
  CHECK(run("snapshot --format xml --time 1/4") == 2);
  CHECK(run("") == 2);
}

TEST_CASE("I/O failures exit with 1") {
  CHECK(run("snapshot --lambda 1.5 --time 1/4 --out /nonexistent-dir/x.csv") == 1);
}

TEST_CASE("timetrace and scan") {
  const auto tt = scratch() / "trace.csv";
  CHECK(run("timetrace --lambda 2 --xi 1 --samples 20 --out " + tt.string()) == 0);
  CHECK(fs::exists(tt));
  const auto sc = scratch() / "scan.csv";
  CHECK(run("scan --lambdas 6 --M 12 --p 1 --p 2 --out " + sc.string()) == 0);
  std::ifstream in(sc);
  const auto t = well::read_csv(in);
  REQUIRE(t.rows() == 2);
  CHECK(t.column("peaks")[0] == 6.0);
  CHECK(t.column("peaks")[1] == 3.0);
}

TEST_CASE("verify passes on the default set") {
  const auto rep = scratch() / "verify.json";
  CHECK(run("verify --out " + rep.string()) == 0);
  CHECK(fs::exists(rep));
}

}
