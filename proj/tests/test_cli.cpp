#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "h1loc/report.hpp"

using namespace h1loc;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" H1LOC_CLI_PATH "\" " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("h1loc_cli_" + name);
  std::ofstream(path) << content;
  return path.string();
}

}  // namespace

TEST_CASE("constants") {
  Run d1 = run("constants --degree 1");
  CHECK(d1.code == 0);
  CHECK(d1.out.find("C                          7\n") != std::string::npos);
  CHECK(d1.out.find("{2,3,5,7}") != std::string::npos);
  Run d2 = run("constants --degree 2 --format json");
  CHECK(d2.code == 0);
  json j = json::parse(d2.out);
  CHECK(j["C"] == 13);
  CHECK(j["quadratic_minimal_set"] == json::parse("[2,3,5,7,11,13]"));
  Run d3 = run("constants --degree 3 --format json");
  CHECK(json::parse(d3.out)["C"].get<std::string>().find("unavailable") != std::string::npos);
  CHECK(run("constants --degree 0").code == 1);
  CHECK(run("constants").code == 1);
}

TEST_CASE("usage errors exit 1") {
  CHECK(run("").code == 1);
  CHECK(run("frobnicate").code == 1);
  CHECK(run("scan --p 5").code == 1);
  CHECK(run("scan --p 5 --n 1 --mode sideways").code == 1);
  CHECK(run("--help").code == 0);
}

TEST_CASE("analyze") {
  const std::string good = temp_file("good.json", R"({"p":5,"n":2,"generators":[[[7,0],[0,1]],[[1,1],[0,1]]]})");
  Run r = run("analyze " + good);
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["order"] == 100);
  CHECK(j["cohomology"]["h1_loc"] == json::array());
  CHECK(run("analyze " + good).out == r.out);

  const std::string trivial = temp_file("trivial.json", R"({"p":2,"n":1,"generators":[]})");
  Run t = run("analyze " + trivial);
  CHECK(t.code == 0);
  CHECK(json::parse(t.out)["cohomology"]["h1"] == json::array());

  CHECK(run("analyze " + temp_file("singular.json", R"({"p":5,"n":2,"generators":[[[5,0],[0,1]]]})")).code == 1);
  CHECK(run("analyze " + temp_file("broken.json", "{\"p\": 5")).code == 1);
  CHECK(run("analyze /nonexistent/spec.json").code == 1);
}

TEST_CASE("scan streams are deterministic and parse back") {
  const std::string args = "scan --p 5 --n 2 --mode sample --count 30 --seed 77";
  Run a = run(args), b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  auto ls = lines(a.out);
  REQUIRE(ls.size() == 32);
  json header = json::parse(ls.front());
  CHECK(header["seed"] == 77);
  json summary = json::parse(ls.back());
  CHECK(summary["records"] == 30);
  CHECK(summary["sentinel"] == "pass");
  for (std::size_t i = 1; i + 1 < ls.size(); ++i) CHECK(to_json(parse_scan_record(ls[i])).dump() == ls[i]);

  CHECK(run("scan --p 5 --n 2 --mode sample --count 30 --seed 78").out != a.out);

  Run empty = run("scan --p 5 --n 2 --mode sample --count 0 --seed 1");
  CHECK(empty.code == 0);
  CHECK(lines(empty.out).size() == 2);

  Run timed = run("scan --p 3 --n 1 --timing");
  CHECK(timed.code == 0);
  CHECK(lines(timed.out)[1].find("wall_ms") != std::string::npos);
  CHECK(run("scan --p 3 --n 1").out.find("wall_ms") == std::string::npos);

  CHECK(run("scan --p 5 --n 2").code == 1);  // exhaustive bound

  const auto out = std::filesystem::temp_directory_path() / "h1loc_cli_scan.ndjson";
  std::filesystem::remove(out);
  Run to_file = run("scan --p 2 --n 2 --out " + out.string());
  CHECK(to_file.code == 0);
  CHECK(to_file.out.empty());
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(lines(ss.str()).size() == 236);
}

TEST_CASE("budget from the environment") {
  Run r = run("scan --p 2 --n 2", "H1LOC_BUDGET=10");
  REQUIRE(r.code == 0);
  json summary = json::parse(lines(r.out).back());
  CHECK(summary["budget"] == 10);
  CHECK(summary["unchecked_over_budget"].get<int>() > 0);
  CHECK(json::parse(lines(run("scan --p 2 --n 2 --budget 96", "H1LOC_BUDGET=10").out).back())["budget"] == 96);
  CHECK(run("scan --p 2 --n 2", "H1LOC_BUDGET=lots").code == 1);
}

TEST_CASE("verify exit codes") {
  Run skipped = run("verify --budget 0");
  CHECK(skipped.code == 0);
  CHECK(skipped.out.find("skipped") != std::string::npos);
  CHECK(skipped.out.find("FAIL") == std::string::npos);

  Run mutated = run("verify --budget 0 --mutate commutator-formula --format json");
  CHECK(mutated.code == 2);
  bool row_failed = false;
  for (const auto& row : json::parse(mutated.out))
    if (row["check"] == "commutator-formula") row_failed = row["status"] == "FAIL";
  CHECK(row_failed);
  CHECK(run("verify --mutate something-else").code == 1);
}
