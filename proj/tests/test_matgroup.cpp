#include <catch_amalgamated.hpp>

#include <map>

#include "h1loc/decompose.hpp"
#include "h1loc/group.hpp"
#include "h1loc/lift.hpp"
#include "support.hpp"

using namespace h1loc;
using testsupport::Rng;

namespace {

const PrimePowerModulus F3(3, 1), F5(5, 1), Z4(2, 2), Z9(3, 2), Z25(5, 2), Z27(3, 3), Z125(5, 3);

Group rho_sigma_mod5() { return close({Mat2::diag(2, 1, F5), Mat2::upper_unipotent(1, F5)}, F5); }

std::uint32_t teichmuller(std::uint32_t a, const PrimePowerModulus& m) { return m.pow(a, m.q() / m.p()); }

/// <rho_n, extra> where rho_n is the Teichmuller diagonal lift of diag(l1, l2)
/// and the extra generators reduce to I or to an upper unipotent mod p.
Group normal_form_group(std::uint32_t l1, std::uint32_t l2, const std::vector<Mat2>& extra, const PrimePowerModulus& m) {
  std::vector<Mat2> gens{Mat2::diag(teichmuller(l1, m), teichmuller(l2, m), m)};
  gens.insert(gens.end(), extra.begin(), extra.end());
  return close(gens, m);
}

}  // namespace

TEST_CASE("matrix operations") {
  Mat2 s = Mat2::upper_unipotent(1, F5);
  CHECK(s.pow(5).is_identity());
  CHECK(s.order() == 5);
  CHECK(Mat2::diag(2, 1, F5).order() == 4);
  CHECK(Mat2::identity(F5).inverse() == Mat2::identity(F5));
  CHECK_THROWS_AS(Mat2(1, 1, 1, 1, F5).inverse(), NonUnit);
  CHECK_THROWS_AS(Mat2::diag(2, 1, F5).pow_class(3u), PreconditionFailed);
  CHECK(Mat2::upper_unipotent(1, Z25).pow_class(Residue(7, Z25)) == Mat2::upper_unipotent(7, Z25));
  CHECK_THROWS_AS(Mat2::identity(F5) * Mat2::identity(Z25), ModulusMismatch);

  // orders against a naive count, including elements whose order involves p + 1
  Rng rng(17);
  for (const auto& m : {F3, F5, Z4, Z9, Z25}) {
    for (int t = 0; t < 200; ++t) {
      Mat2 x = rng.invertible(m);
      std::uint64_t k = 1;
      Mat2 y = x;
      while (!y.is_identity()) {
        y = y * x;
        ++k;
      }
      CHECK(x.order() == k);
    }
  }
}

TEST_CASE("closure") {
  CHECK(close({}, F5).order() == 1);
  CHECK(close({Mat2::upper_unipotent(1, F3)}, F3).order() == 3);
  Group g = rho_sigma_mod5();
  CHECK(g.order() == 20);
  CHECK_THROWS_AS(close({Mat2(1, 1, 1, 1, F5)}, F5), NonUnit);
  CHECK_THROWS_AS(close({Mat2(1, 1, 0, 1, F5), Mat2(1, 0, 1, 1, F5)}, F5, 50), CapExceeded);

  // closure soundness and the spanning tree
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    const auto& m = t % 2 ? Z9 : F5;
    Group h = close({rng.invertible(m), rng.invertible(m)}, m);
    if (h.order() > 5000) continue;
    for (std::size_t i = 0; i < h.order(); i += std::max<std::size_t>(1, h.order() / 60)) {
      CHECK(h.contains(h[i].inverse()));
      for (std::size_t j = 0; j < h.order(); ++j) CHECK(h.contains(h[i] * h[j]));
      if (i > 0) CHECK(h[i] == h.generators()[h.tree_gen(i)] * h[h.tree_parent(i)]);
    }
  }
}

TEST_CASE("reduction mod p^j") {
  Group g = rho_sigma_mod5();
  CHECK(reduce_mod(g, 1).same_elements(g));
  CHECK(reduce_mod(trivial_group(Z25), 1).order() == 1);
  CHECK_THROWS_AS(reduce_mod(g, 2), PreconditionFailed);

  Group h = close({Mat2(7, 5, 0, 1, Z25), Mat2(1, 1, 5, 1, Z25)}, Z25);
  Group h1 = reduce_mod(h, 1);
  CHECK(h.order() % h1.order() == 0);
  for (const auto& x : h.elements()) CHECK(h1.contains(x.reduce(1)));

  Rng rng(4);
  for (int t = 0; t < 10; ++t) {
    Group k = close({rng.invertible(Z9), rng.invertible(Z9)}, Z9);
    if (k.order() > 500) continue;
    for (std::size_t i = 0; i < k.order(); ++i)
      for (std::size_t j = 0; j < k.order(); j += 7) CHECK((k[i] * k[j]).reduce(1) == k[i].reduce(1) * k[j].reduce(1));
  }
}

TEST_CASE("sylow p-subgroup") {
  Group s = close({Mat2::upper_unipotent(1, F3)}, F3);
  CHECK(sylow_p(s).same_elements(s));
  CHECK(sylow_p(close({Mat2::diag(2, 1, F5)}, F5)).order() == 1);
  Group g = rho_sigma_mod5();
  CHECK(sylow_p(g).same_elements(close({Mat2::upper_unipotent(1, F5)}, F5)));
  // in SL_2(F_3) the elements of 3-power order do not form a subgroup
  Group sl = close({Mat2(1, 1, 0, 1, F3), Mat2(1, 0, 1, 1, F3)}, F3);
  CHECK_THROWS_AS(sylow_p(sl), PreconditionFailed);
}

TEST_CASE("triangular slices") {
  auto t = triangular_slices(trivial_group(F5));
  CHECK(t.diag.order() == 1);
  CHECK(t.upper.order() == 1);
  auto s = triangular_slices(rho_sigma_mod5());
  CHECK(s.diag.order() == 4);
  CHECK(s.strict_upper.order() == 5);
  CHECK(s.strict_lower.order() == 1);
  CHECK(s.upper.order() == 20);
  CHECK(s.lower.order() == 4);
  CHECK(triangular_slices(close({Mat2::lower_unipotent(1, F3)}, F3)).strict_upper.order() == 1);
}

TEST_CASE("cyclic subgroups") {
  CHECK(cyclic_subgroups(trivial_group(F5)).size() == 1);
  CHECK(cyclic_subgroups(close({Mat2::upper_unipotent(1, F5)}, F5)).size() == 2);

  Group g = rho_sigma_mod5();
  std::set<std::vector<std::uint64_t>> brute;
  for (const auto& x : g.elements()) brute.insert(close({x}, F5).sorted_keys());
  auto cs = cyclic_subgroups(g);
  CHECK(cs.size() == brute.size());
  for (const auto& c : cs) CHECK(brute.count(c.sorted_keys()));
}

TEST_CASE("commutator formula and derived subgroups") {
  Mat2 d(2, 1, 0, 1, F5), c(1, 1, 0, 1, F5);
  CHECK(commutator(d, c) == Mat2::upper_unipotent(1, F5));
  CHECK(upper_commutator_formula(d, c) == commutator(d, c));
  CHECK(derived_subgroup(close({Mat2::diag(2, 3, F5)}, F5)).order() == 1);
  CHECK(derived_subgroup(rho_sigma_mod5()).same_elements(close({Mat2::upper_unipotent(1, F5)}, F5)));

  Rng rng(8);
  for (const auto& m : {Z4, Z9, Z25, Z27}) {
    for (int t = 0; t < 500; ++t) {
      Mat2 x = rng.upper(m), y = rng.upper(m);
      CHECK(upper_commutator_formula(x, y) == commutator(x, y));
    }
    // the mutated formula is caught on some pair
    bool caught = false;
    for (int t = 0; t < 200 && !caught; ++t) {
      Mat2 x = rng.upper(m), y = rng.upper(m);
      caught = upper_commutator_formula_mutated(x, y) != commutator(x, y);
    }
    CHECK(caught);
  }

  for (int t = 0; t < 30; ++t) {
    const auto& m = t % 2 ? Z25 : Z27;
    Group u = close({rng.upper(m), rng.upper(m)}, m, 100000);
    auto j = unipotent_cyclic_level(derived_subgroup(u));
    CHECK(j.has_value());
  }
}

TEST_CASE("classification of the mod-p image") {
  auto c = classify_g1(close({Mat2::diag(2, 1, F5)}, F5));
  CHECK(c.form == G1Form::cyclic_diag);
  CHECK(c.order_rho == 4);
  CHECK(c.lambda1 == 2);
  CHECK(c.lambda2 == 1);
  CHECK(c.basis_change.is_identity());

  auto u = classify_g1(close({Mat2::upper_unipotent(1, F5)}, F5));
  CHECK(u.form == G1Form::diag_plus_unipotent);
  CHECK(u.rho.is_identity());

  Group gl = close({Mat2(2, 0, 0, 1, F5), Mat2(4, 1, 4, 0, F5)}, F5);
  REQUIRE(gl.order() == 480);
  CHECK(classify_g1(gl).form == G1Form::other);
  // exhaust every conjugator: none makes GL_2(F_5) upper triangular
  for (std::uint32_t k = 0; k < 625; ++k) {
    Mat2 b(k % 5, k / 5 % 5, k / 25 % 5, k / 125, F5);
    if (!b.invertible()) continue;
    bool upper = true;
    for (const auto& x : gl.generators()) upper = upper && conjugate_by(x, b).is_upper();
    CHECK_FALSE(upper);
  }

  // a conjugated normal form is recognized and sigma is normalized to (1 1 / 0 1)
  Mat2 b(1, 2, 3, 2, F5);
  Group g = conjugate_group(rho_sigma_mod5(), b.inverse());
  auto r = classify_g1(g);
  REQUIRE(r.form == G1Form::diag_plus_unipotent);
  Group back = conjugate_group(g, r.basis_change);
  CHECK(back.contains(Mat2::upper_unipotent(1, F5)));
  CHECK(back.contains(r.rho));
  CHECK(r.lambda1 != r.lambda2);
}

TEST_CASE("diagonal lift of rho") {
  Group diag = close({Mat2::diag(7, 1, Z25)}, Z25);  // 7 = 2 mod 5 has order 20 mod 25
  auto l = diagonal_rho_lift(diag);
  REQUIRE(l);
  CHECK(l->basis_change.is_identity());
  CHECK(l->order == 4);
  CHECK(l->matrix == Mat2::diag(7, 1, Z25).pow(5));
  CHECK(l->matrix.reduce(1) == Mat2::diag(2, 1, F5));

  CHECK_FALSE(diagonal_rho_lift(close({Mat2::upper_unipotent(1, Z25)}, Z25)));

  Rng rng(9);
  for (int t = 0; t < 40; ++t) {
    const auto& m = t % 2 ? Z25 : Z125;
    std::uint32_t a = 1 + static_cast<std::uint32_t>(rng.below(4)), d = 1 + static_cast<std::uint32_t>(rng.below(4));
    if (a == d) continue;
    Mat2 b = rng.invertible(m);
    Mat2 x = b * Mat2(a + 5 * rng.residue(m), 5 * rng.residue(m), 5 * rng.residue(m), d + 5 * rng.residue(m), m) * b.inverse();
    auto lift = diagonal_rho_lift(close({x}, m));
    REQUIRE(lift);
    CHECK(lift->matrix.is_diagonal());
    CHECK(lift->order == lift->g1.order_rho);
    CHECK(lift->conjugated.contains(lift->matrix));
  }
}

TEST_CASE("eigen split of the last congruence kernel") {
  CHECK(eigen_split(Mat2::identity(Z9)).product().is_identity());
  auto s = eigen_split(Mat2(1, 3, 3, 1, Z9));
  CHECK(s.upper == Mat2::upper_unipotent(3, Z9));
  CHECK(s.lower == Mat2::lower_unipotent(3, Z9));
  CHECK(s.diag_a.is_identity());
  CHECK(s.diag_d.is_identity());
  auto t = eigen_split(Mat2::diag(4, 1, Z9));
  CHECK(t.diag_a == Mat2::diag(4, 1, Z9));
  CHECK(t.upper.is_identity());
  CHECK(t.lower.is_identity());
  CHECK_THROWS_AS(eigen_split(Mat2::upper_unipotent(1, Z9)), PreconditionFailed);

  // components rebuilt from conjugation and powers match the closed form
  Group g = normal_form_group(2, 1, {Mat2::upper_unipotent(1, Z25)}, Z25);
  auto lift = diagonal_rho_lift(g);
  REQUIRE(lift);
  Rng rng(12);
  for (int i = 0; i < 50; ++i) {
    Mat2 tau(1 + 5 * rng.below(5), 5 * rng.below(5), 5 * rng.below(5), 1 + 5 * rng.below(5), Z25);
    CHECK(certify_eigen_split(tau, eigen_split(tau), *lift));
  }
}

TEST_CASE("decomposition in the Sylow subgroup") {
  Group g = normal_form_group(2, 1, {Mat2::upper_unipotent(1, Z25), Mat2(6, 0, 5, 1, Z25)}, Z25);
  auto lift = diagonal_rho_lift(g);
  REQUIRE(lift);
  REQUIRE(lift->order == 4);
  Group hn = sylow_p(lift->conjugated);
  HnDecomposer dec(hn, *lift);
  CHECK(dec.decompose(Mat2::identity(Z25)).empty());
  Mat2 s = Mat2::upper_unipotent(1, Z25);
  REQUIRE(hn.contains(s));
  auto ws = dec.decompose(s);
  REQUIRE(ws.size() == 1);
  CHECK(ws.factors[0].matrix == s);
  CHECK(ws.factors[0].shape == FactorShape::strict_upper);
  for (const auto& tau : hn.elements()) {
    auto w = dec.decompose(tau);
    CHECK(w.product(Z25) == tau);
    for (const auto& f : w.factors) {
      CHECK(hn.contains(f.matrix));
      CHECK(has_shape(f.matrix, f.shape));
    }
  }
  CHECK(generated_by_triangular_parts(hn));

  // three levels
  Group g3 = normal_form_group(2, 1, {Mat2::upper_unipotent(1, Z125), Mat2::diag(26, 1, Z125)}, Z125);
  {
    auto l3 = diagonal_rho_lift(g3);
    REQUIRE(l3);
    Group h3 = sylow_p(l3->conjugated);
    HnDecomposer d3(h3, *l3);
    for (std::size_t i = 0; i < h3.order(); i += 7) CHECK(d3.decompose(h3[i]).product(Z125) == h3[i]);
  }

  // rho of order 2 is refused
  Group g2 = normal_form_group(4, 1, {Mat2::upper_unipotent(1, Z25)}, Z25);
  auto l2 = diagonal_rho_lift(g2);
  REQUIRE(l2);
  CHECK_THROWS_AS(HnDecomposer(sylow_p(l2->conjugated), *l2), PreconditionFailed);
}
