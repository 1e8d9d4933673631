#include <catch_amalgamated.hpp>

#include "h1loc/enumerate.hpp"
#include "h1loc/verifier.hpp"
#include "support.hpp"

using namespace h1loc;
using testsupport::Rng;

namespace {

const PrimePowerModulus F3(3, 1), F5(5, 1), Z4(2, 2), Z25(5, 2);

// 7 and 24 are the order-4 and order-2 roots of unity mod 25 lifting 2 and 4
Group first_case_group() { return close({Mat2::diag(7, 24, Z25), Mat2(1, 5, 5, 1, Z25)}, Z25); }
Group second_case_shape() { return close({Mat2::diag(7, 1, Z25), Mat2::upper_unipotent(1, Z25)}, Z25); }

std::vector<Group> normal_form_groups(std::size_t count, std::uint64_t seed) {
  SampleOptions so;
  so.count = count;
  so.seed = seed;
  so.families = {SampleFamily::normal_form, SampleFamily::cyclic_diagonal};
  return sample_subgroups(Z25, so).groups;
}

}  // namespace

TEST_CASE("fixed points of exact order p") {
  CHECK(fixed_point_exact_order_p(close({Mat2::upper_unipotent(1, F5)}, F5)));
  CHECK_FALSE(fixed_point_exact_order_p(close({Mat2::diag(2, 2, F5)}, F5)));
  CHECK(fixed_point_exact_order_p(close({Mat2::diag(2, 1, F5)}, F5)));
  CHECK(fixed_point_exact_order_p(trivial_group(F5)));
  // only the mod-p image matters
  CHECK(fixed_point_exact_order_p(close({Mat2(6, 5, 10, 1, Z25)}, Z25)));
}

TEST_CASE("stable lines mod p") {
  Rng rng(3);
  for (int t = 0; t < 30; ++t) CHECK(stabilizes_line_mod_p(close({rng.upper(F5), rng.upper(F5)}, F5)));
  Group gl = close({Mat2::upper_unipotent(1, F5), Mat2(0, 4, 1, 0, F5), Mat2::diag(2, 1, F5)}, F5);
  REQUIRE(gl.order() == 480);
  CHECK_FALSE(stabilizes_line_mod_p(gl));
  CHECK(stabilizes_line_mod_p(trivial_group(F5)));
  // lower triangular groups stabilize the second axis
  CHECK(stabilizes_line_mod_p(close({Mat2::lower_unipotent(1, F5), Mat2::diag(2, 3, F5)}, F5)));
}

TEST_CASE("hypothesis reports are internally consistent") {
  for (const auto& m : {F3, F5, Z4})
    for (const auto& g : exhaustive_subgroups(m)) {
      const HypothesisReport h = hypothesis_report(g);
      if (h.has_fixed_point_exact_order_p) CHECK(h.stabilizes_line_mod_p);
      if (h.has_nontrivial_scalar) CHECK_FALSE(h.has_fixed_point_exact_order_p);
      if (h.g1.in_normal_form()) {
        CHECK(h.stabilizes_line_mod_p);
        CHECK(h.order_rho == h.g1.rho.order());
        // lambda1 = 1 fixes the first basis vector
        if (h.lambda1 == 1) CHECK(h.has_fixed_point_exact_order_p);
      }
      if (h.order_rho >= 3) CHECK(h.g1.in_normal_form());
      if (h.g1.form == G1Form::cyclic_diag) CHECK(h.g1_cyclic);
    }
}

TEST_CASE("main theorem verdicts on examples") {
  Group g = close({Mat2::diag(7, 1, Z25), Mat2(6, 1, 0, 1, Z25)}, Z25);
  TheoremVerdict v = theorem1_verdict(g);
  CHECK(v.checked);
  CHECK(v.applicable);
  CHECK(v.conclusion_checked);
  CHECK(v.h1_loc.trivial());

  TheoremVerdict s = theorem1_verdict(close({Mat2::upper_unipotent(1, F3)}, F3));
  CHECK_FALSE(s.applicable);
  CHECK(s.violated_hypotheses.front() == "point of exact order p");

  TheoremVerdict sc = theorem1_verdict(close({Mat2::diag(2, 2, F5), Mat2::upper_unipotent(1, F5)}, F5));
  CHECK(sc.applicable);
  CHECK(sc.h1.trivial());
  CHECK(sc.note == "H^1 trivial");

  TheoremVerdict big = theorem1_verdict(g, 10);
  CHECK_FALSE(big.checked);
  CHECK_FALSE(big.applicable);
}

TEST_CASE("a contradicted verdict throws with a reproduction bundle") {
  // feed a Z/4 group with a nontrivial local class together with a report
  // that claims every hypothesis holds
  const Group* witness = nullptr;
  auto subs = exhaustive_subgroups(Z4);
  for (const auto& g : subs)
    if (!h1_loc(Action(g)).trivial()) {
      witness = &g;
      break;
    }
  REQUIRE(witness);
  HypothesisReport lie = hypothesis_report(*witness);
  lie.has_fixed_point_exact_order_p = false;
  lie.g1.form = G1Form::cyclic_diag;
  lie.order_rho = 3;
  try {
    theorem1_verdict(*witness, kDefaultCohomologyBudget, &lie);
    FAIL("expected a falsification");
  } catch (const Falsification& e) {
    CHECK(std::string(e.bundle()).find("\"cocycle\"") != std::string::npos);
    CHECK(std::string(e.bundle()).find("\"p\":2") != std::string::npos);
  }
}

TEST_CASE("two-case local vanishing") {
  Prop8Verdict c1 = proposition8_verdict(first_case_group());
  CHECK(c1.which == Prop8Case::eigenvalues_nontrivial);
  CHECK(c1.verdict.h1.factors() == std::vector<std::uint64_t>{5});
  CHECK(c1.verdict.h1_loc.trivial());

  // H^1 vanishes here, so the verdict does not apply, and H^1_loc is trivial with it
  Prop8Verdict c2 = proposition8_verdict(second_case_shape());
  CHECK(c2.verdict.h1_loc.trivial());
  CHECK(c2.which == Prop8Case::not_met);

  std::size_t excluded = 0, first = 0;
  for (const auto& g : normal_form_groups(300, 5)) {
    const Prop8Verdict v = proposition8_verdict(g);
    const HypothesisReport h = hypothesis_report(g);
    if (v.which == Prop8Case::eigenvalues_nontrivial) {
      ++first;
      CHECK(v.verdict.h1_loc.trivial());
    }
    if (!v.verdict.h1.trivial() && h.g1.in_normal_form() && h.order_rho >= 3 && h.lambda1 == 1) {
      ++excluded;
      CHECK(v.which == Prop8Case::not_met);
      CHECK(v.verdict.violated_hypotheses.back().rfind("excluded", 0) == 0);
    }
  }
  CHECK(first > 0);
  CHECK(excluded > 0);
}

TEST_CASE("local cohomology of triangular pieces") {
  Prop16Report r = proposition16_suite(first_case_group());
  REQUIRE(r.ran);
  CHECK(r.checks.size() == 5);
  for (const auto& c : r.checks) CHECK(c.h1_loc.trivial());
  CHECK(r.lower_unipotent_cyclic);
  CHECK(r.gluing_checked);
  CHECK(r.gluing_holds);

  Prop16Report upper = proposition16_suite(second_case_shape());
  REQUIRE(upper.ran);
  CHECK(upper.checks.front().name == "sL_n");
  CHECK(upper.checks.front().order == 1);

  Prop16Report small = proposition16_suite(close({Mat2::diag(24, 1, Z25), Mat2::upper_unipotent(1, Z25)}, Z25));
  CHECK_FALSE(small.ran);
  CHECK(small.skip_reason == "order of rho below 3");

  std::size_t ran = 0;
  for (const auto& g : normal_form_groups(100, 6)) {
    Prop16Report s = proposition16_suite(g);
    if (!s.ran) continue;
    ++ran;
    CHECK(s.lower_unipotent_cyclic);
    if (s.gluing_checked) CHECK(s.gluing_holds);
  }
  CHECK(ran > 20);
}

TEST_CASE("no sampled or enumerated group contradicts the main theorem") {
  std::size_t witnesses = 0;
  for (const auto& m : {F3, F5, Z4})
    for (const auto& g : exhaustive_subgroups(m)) {
      TheoremVerdict v;
      REQUIRE_NOTHROW(v = theorem1_verdict(g));
      if (!v.h1_loc.trivial()) {
        ++witnesses;
        CHECK_FALSE(v.applicable);
        CHECK(m.p() == 2);
      }
    }
  CHECK(witnesses > 0);
}

TEST_CASE("constant tables") {
  ConstantsTable d1 = constants(1);
  CHECK(d1.c == 7u);
  CHECK(d1.s_tilde == std::vector<std::uint32_t>{2, 3, 5, 7});
  CHECK(d1.s_set.size() == 12);
  CHECK(d1.s_set.back() == 163);
  ConstantsTable d2 = constants(2);
  CHECK(d2.c == 13u);
  CHECK(d2.quadratic_set == std::vector<std::uint32_t>{2, 3, 5, 7, 11, 13});
  ConstantsTable d3 = constants(3);
  CHECK_FALSE(d3.c);
  CHECK(d3.p0_bound == 7);
  CHECK(d3.largest_prime_in_bound == 7);
  CHECK(d3.symbolic.find("unavailable") != std::string::npos);
  ConstantsTable d4 = constants(4);
  CHECK(d4.p0_bound == 9);
  CHECK(d4.largest_prime_in_bound == 7);
  CHECK_THROWS_AS(constants(0), PreconditionFailed);
}
