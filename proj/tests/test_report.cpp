#include <catch_amalgamated.hpp>

#include <set>

#include "h1loc/scan.hpp"
#include "support.hpp"

using namespace h1loc;
using testsupport::Rng;

namespace {

const PrimePowerModulus F2(2, 1), F3(3, 1), F5(5, 1), Z4(2, 2), Z9(3, 2), Z25(5, 2);

std::set<std::uint64_t> hashes(const std::vector<Group>& gs) {
  std::set<std::uint64_t> out;
  for (const auto& g : gs) out.insert(g.hash());
  return out;
}

}  // namespace

TEST_CASE("group specs") {
  GroupSpec s = parse_group_spec(R"({"p":5,"n":2,"generators":[[[32,0],[0,-24]],[[1,1],[0,1]]],"label":"x"})");
  CHECK(s.p == 5);
  CHECK(s.n == 2);
  REQUIRE(s.generators.size() == 2);
  CHECK(s.generators[0] == Mat2::diag(7, 1, Z25));  // reduced on load
  CHECK(s.label == "x");
  CHECK(parse_group_spec(to_json(s).dump()).generators == s.generators);

  GroupSpec empty = parse_group_spec(R"({"p":2,"n":1,"generators":[]})");
  CHECK(empty.generators.empty());

  auto error_of = [](const std::string& text) {
    try {
      parse_group_spec(text);
    } catch (const InputError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(error_of(R"({"p":5,"n":2,"generators":[[[5,0],[0,1]]]})").find("generators[0]") != std::string::npos);
  CHECK(error_of(R"({"p":6,"n":1,"generators":[]})").find("spec.p") != std::string::npos);
  CHECK(error_of(R"({"p":5,"generators":[]})").find("'n'") != std::string::npos);
  CHECK(error_of(R"({"p":5,"n":1,"generators":[[[1,0],[0]]]})").find("2x2") != std::string::npos);
  CHECK(error_of(R"({"p":5,"n":1,"generators":[[[1,0],[0,"a"]]]})").find("[1][1]") != std::string::npos);
  CHECK(error_of("{\"p\":5,") .find("malformed") != std::string::npos);
}

TEST_CASE("invariants serialize as factor lists") {
  QuotientInvariants q{5, {2, 1}};
  CHECK(invariants_json(q).dump() == "[25,5]");
  CHECK(invariants_from_json(invariants_json(q), 5, "x") == q);
  CHECK_THROWS_AS(invariants_from_json(json::parse("[6]"), 5, "x"), InputError);
  CHECK_THROWS_AS(invariants_from_json(json::parse("[1]"), 5, "x"), InputError);
}

TEST_CASE("scan records round-trip") {
  for (const auto& m : {F3, Z4}) {
    ScanOptions o;
    o.p = m.p();
    o.n = m.n();
    const ScanResult r = run_scan(o);
    for (const auto& rec : r.records) {
      const std::string line = to_json(rec).dump();
      CHECK(parse_scan_record(line) == rec);
      CHECK(to_json(parse_scan_record(line)).dump() == line);
    }
  }
  ScanRecord timed;
  timed.wall_ms = 1.25;
  timed.h1 = QuotientInvariants{2, {}};
  timed.h1_loc = QuotientInvariants{2, {}};
  CHECK(parse_scan_record(to_json(timed).dump()) == timed);
  CHECK_THROWS_AS(parse_scan_record("{\"hash\":\"12\"}"), InputError);
}

TEST_CASE("exhaustive enumeration matches independent brute force") {
  CHECK(exhaustive_subgroups(F2).size() == 6);
  CHECK(exhaustive_subgroups(F3).size() == 55);
  // (modulus, order limit); a limit equal to |GL_2| means the full subgroup lattice
  for (const auto& [m, cap] : {std::pair{F3, std::size_t{48}}, {Z4, 96}, {F5, 24}, {Z9, 6}}) {
    const auto fast = exhaustive_subgroups(m, cap == gl2_order(m) ? 0 : cap);
    const auto slow = testsupport::small_subgroups(m, cap);
    CHECK(hashes(fast) == hashes(slow));
    CHECK(fast.size() == hashes(fast).size());
  }
  CHECK_THROWS_AS(exhaustive_subgroups(Z25), PreconditionFailed);
}

TEST_CASE("sampling is deterministic and respects its options") {
  SampleOptions so;
  so.count = 40;
  so.seed = 99;
  so.budget = 500;
  const SampleResult a = sample_subgroups(Z25, so), b = sample_subgroups(Z25, so);
  REQUIRE(a.groups.size() == 40);
  for (std::size_t i = 0; i < a.groups.size(); ++i) {
    CHECK(a.groups[i].generators() == b.groups[i].generators());
    CHECK(a.groups[i].order() <= 500);
  }
  CHECK(hashes(a.groups).size() == 40);
  so.seed = 100;
  CHECK(hashes(sample_subgroups(Z25, so).groups) != hashes(a.groups));

  so.count = 0;
  CHECK(sample_subgroups(Z25, so).groups.empty());

  so.count = 20;
  so.require_full_det = true;
  for (const auto& g : sample_subgroups(Z9, so).groups) CHECK(has_full_determinant(g));
  so.families.clear();
  CHECK_THROWS_AS(sample_subgroups(Z9, so), PreconditionFailed);
}

TEST_CASE("scan output does not depend on the thread count") {
  ScanOptions o;
  o.p = 5;
  o.n = 2;
  o.mode = ScanMode::sample;
  o.count = 60;
  o.seed = 4;
  o.threads = 1;
  const ScanResult one = run_scan(o);
  o.threads = 4;
  const ScanResult four = run_scan(o);
  REQUIRE(one.records.size() == four.records.size());
  CHECK(one.records == four.records);
  CHECK(std::is_sorted(one.records.begin(), one.records.end(),
                       [](const ScanRecord& x, const ScanRecord& y) { return x.hash < y.hash; }));
  CHECK(summary_json(o, one.summary) == summary_json(o, four.summary));
}

TEST_CASE("scan summaries") {
  ScanOptions o;
  o.p = 2;
  o.n = 2;
  const ScanResult r = run_scan(o);
  CHECK(r.summary.records == 234);
  CHECK(r.summary.h1_loc_nontrivial > 0);
  CHECK(r.summary.sentinel_ok());
  const json s = summary_json(o, r.summary);
  CHECK(s["sentinel"] == "pass");
  CHECK(s["seed"] == 0);

  o.max_order = 8;
  for (const auto& rec : run_scan(o).records) CHECK(rec.order <= 8);

  o.max_order = 0;
  o.budget = 10;
  const ScanResult capped = run_scan(o);
  CHECK(capped.summary.unchecked > 0);
  for (const auto& rec : capped.records) CHECK(rec.checked == (rec.order <= 10));
}

TEST_CASE("analysis reports") {
  GroupSpec spec = parse_group_spec(R"({"p":5,"n":2,"generators":[[[7,0],[0,1]],[[1,1],[0,1]]]})");
  const json r = analyze(spec, 2000);
  CHECK(r["order"] == 100);
  CHECK(r["g1_classification"]["form"] == "diag-plus-unipotent");
  CHECK(r["rho_lift"]["order"] == 4);
  CHECK(r["rho_lift"]["H_n_decomposed"] == 25);
  CHECK(r["cohomology"]["h1_loc"] == json::array());
  CHECK(r["verdicts"]["theorem1"]["applicable"] == true);
  CHECK(analyze(spec, 2000).dump() == r.dump());

  const json t = analyze(parse_group_spec(R"({"p":2,"n":1,"generators":[]})"), 2000);
  CHECK(t["order"] == 1);
  CHECK(t["cohomology"]["h1"] == json::array());
  CHECK(t["cohomology"]["h1_loc"] == json::array());

  const json over = analyze(spec, 50);
  CHECK(over["cohomology"]["checked"] == false);
}
