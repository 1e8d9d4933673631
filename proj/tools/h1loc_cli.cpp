// h1loc: analyze a matrix group, scan subgroup spaces, run the verification
// matrix, print the constant tables.
//
// Exit codes: 0 clean, 1 usage or input error, 2 falsification or failed check.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "h1loc/suite.hpp"

namespace {

using namespace h1loc;

constexpr int kExitInput = 1;
constexpr int kExitFalsified = 2;

std::size_t default_budget() {
  const char* env = std::getenv("H1LOC_BUDGET");
  if (!env || !*env) return kDefaultCohomologyBudget;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0') throw InputError(std::string("H1LOC_BUDGET: not a non-negative integer: ") + env);
  return static_cast<std::size_t>(v);
}

std::string read_input(const std::string& path) {
  std::ostringstream os;
  if (path == "-") {
    os << std::cin.rdbuf();
    return os.str();
  }
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  os << in.rdbuf();
  return os.str();
}

/// stdout unless --out names a file.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InputError("cannot write " + path);
    }
  }
  std::ostream& out() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

int cmd_analyze(const std::string& path, std::size_t budget, const std::string& out) {
  const GroupSpec spec = parse_group_spec(read_input(path));
  json report = analyze(spec, budget);
  Sink sink(out);
  sink.out() << report.dump(2) << '\n';
  return 0;
}

int cmd_scan(const ScanOptions& opt, const std::string& out) {
  const ScanResult r = run_scan(opt);
  Sink sink(out);
  json header{{"header", true},       {"p", opt.p},           {"n", opt.n},
              {"mode", to_string(opt.mode)}, {"seed", opt.seed}, {"budget", opt.budget}};
  sink.out() << header.dump() << '\n';
  for (const auto& rec : r.records) sink.out() << to_json(rec).dump() << '\n';
  sink.out() << summary_json(opt, r.summary).dump() << '\n';
  std::cerr << "scan: " << r.summary.records << " groups, " << r.summary.h1_loc_nontrivial
            << " with nontrivial H^1_loc, sentinel " << (r.summary.sentinel_ok() ? "pass" : "FAIL") << '\n';
  return r.summary.sentinel_ok() ? 0 : kExitFalsified;
}

int cmd_verify(const VerifyOptions& opt, const std::string& format) {
  const auto rows = run_verify(opt);
  bool failed = false;
  std::size_t skipped = 0;
  if (format == "json") {
    json j = json::array();
    for (const auto& r : rows) j.push_back(json{{"check", r.name}, {"status", to_string(r.status)}, {"detail", r.detail}});
    std::cout << j.dump(2) << '\n';
  } else {
    for (const auto& r : rows) {
      std::string name = r.name;
      name.resize(30, ' ');
      std::string st = to_string(r.status);
      st.resize(8, ' ');
      std::cout << name << st << r.detail << '\n';
    }
  }
  for (const auto& r : rows) {
    if (r.status == RowStatus::fail) failed = true;
    if (r.status == RowStatus::skipped) ++skipped;
  }
  if (skipped) std::cerr << "verify: warning: " << skipped << " check(s) skipped\n";
  return failed ? kExitFalsified : 0;
}

int cmd_constants(std::uint32_t degree, const std::string& format) {
  const ConstantsTable t = constants(degree);
  if (format == "json") std::cout << to_json(t).dump(2) << '\n';
  else std::cout << constants_table_text(t);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local cohomology of finite subgroups of GL_2(Z/p^nZ)"};
  app.require_subcommand(1);

  std::size_t budget = 0;
  std::string out;

  auto* analyze_cmd = app.add_subcommand("analyze", "Full report for one group given as a JSON spec");
  std::string spec_path;
  analyze_cmd->add_option("file", spec_path, "Group spec file, or - for stdin")->required();
  analyze_cmd->add_option("--budget", budget, "Largest group order for cohomology (default: $H1LOC_BUDGET or 2000)");
  analyze_cmd->add_option("--out", out, "Write the report here instead of stdout");

  auto* scan_cmd = app.add_subcommand("scan", "One record per subgroup, exhaustive or sampled");
  ScanOptions scan;
  std::string mode = "exhaustive";
  scan_cmd->add_option("--p", scan.p, "Prime")->required();
  scan_cmd->add_option("--n", scan.n, "Exponent")->required();
  scan_cmd->add_option("--mode", mode, "exhaustive or sample")->check(CLI::IsMember({"exhaustive", "sample"}));
  scan_cmd->add_option("--count", scan.count, "Distinct groups to sample");
  scan_cmd->add_option("--seed", scan.seed, "64-bit sampling seed");
  scan_cmd->add_flag("--require-full-det", scan.require_full_det, "Keep only groups with surjective determinant");
  scan_cmd->add_option("--budget", budget, "Largest group order for cohomology (default: $H1LOC_BUDGET or 2000)");
  scan_cmd->add_option("--max-order", scan.max_order, "Exhaustive mode: skip subgroups larger than this");
  scan_cmd->add_option("--threads", scan.threads, "Worker threads (default: hardware concurrency)");
  scan_cmd->add_flag("--timing", scan.timing, "Add wall time to each record");
  scan_cmd->add_option("--out", out, "Write records here instead of stdout");

  auto* verify_cmd = app.add_subcommand("verify", "Run the verification matrix with fixed seeds");
  VerifyOptions verify;
  std::string mutate, verify_format = "table";
  verify_cmd->add_option("--budget", budget, "Largest group order for cohomology (default: $H1LOC_BUDGET or 2000)");
  verify_cmd->add_option("--mutate", mutate, "Swap in a deliberately broken implementation")
      ->check(CLI::IsMember({"commutator-formula"}));
  verify_cmd->add_option("--format", verify_format, "table or json")->check(CLI::IsMember({"table", "json"}));

  auto* constants_cmd = app.add_subcommand("constants", "Known constants and prime sets for a field degree");
  std::uint32_t degree = 1;
  std::string constants_format = "table";
  constants_cmd->add_option("--degree", degree, "Degree [k:Q]")->required()->check(CLI::PositiveNumber);
  constants_cmd->add_option("--format", constants_format, "table or json")->check(CLI::IsMember({"table", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    auto budget_given = [&](CLI::App* cmd) { return cmd->count("--budget") > 0; };
    if (*analyze_cmd) {
      if (!budget_given(analyze_cmd)) budget = default_budget();
      return cmd_analyze(spec_path, budget, out);
    }
    if (*scan_cmd) {
      scan.mode = mode == "sample" ? ScanMode::sample : ScanMode::exhaustive;
      scan.budget = budget_given(scan_cmd) ? budget : default_budget();
      return cmd_scan(scan, out);
    }
    if (*verify_cmd) {
      verify.budget = budget_given(verify_cmd) ? budget : default_budget();
      verify.mutate_commutator = mutate == "commutator-formula";
      return cmd_verify(verify, verify_format);
    }
    if (*constants_cmd) return cmd_constants(degree, constants_format);
  } catch (const Falsification& e) {
    std::cerr << "falsification: " << e.what() << '\n' << "reproduction bundle: " << e.bundle() << '\n';
    return kExitFalsified;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
