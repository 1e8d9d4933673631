#pragma once

// The `verify` matrix: every structural property and verdict, exercised with
// fixed seeds. Rows are keyed by what they check.

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "h1loc/oracle.hpp"
#include "h1loc/scan.hpp"

namespace h1loc {

enum class RowStatus { pass, fail, skipped };

inline const char* to_string(RowStatus s) {
  switch (s) {
    case RowStatus::pass: return "pass";
    case RowStatus::fail: return "FAIL";
    case RowStatus::skipped: return "skipped";
  }
  return "?";
}

struct SuiteRow {
  std::string name;
  RowStatus status = RowStatus::skipped;
  std::string detail;
};

struct VerifyOptions {
  std::size_t budget = kDefaultCohomologyBudget;
  bool mutate_commutator = false;
};

namespace suite {

struct Skip {
  std::string why;
};

struct Outcome {
  bool ok = true;
  std::string detail;
};

inline PrimePowerModulus mod(std::uint32_t p, std::uint32_t n) { return PrimePowerModulus(p, n); }

inline std::vector<Group> normal_form_sample(const PrimePowerModulus& m, std::size_t count, std::uint64_t seed,
                                             std::size_t budget) {
  SampleOptions so;
  so.count = count;
  so.seed = seed;
  so.budget = budget;
  so.families = {SampleFamily::normal_form, SampleFamily::cyclic_diagonal};
  return sample_subgroups(m, so).groups;
}

inline std::vector<Group> mixed_sample(const PrimePowerModulus& m, std::size_t count, std::uint64_t seed,
                                       std::size_t budget) {
  SampleOptions so;
  so.count = count;
  so.seed = seed;
  so.budget = budget;
  return sample_subgroups(m, so).groups;
}

inline void need_budget(std::size_t budget, std::size_t want = 1) {
  if (budget < want) throw Skip{"cohomology budget " + std::to_string(budget) + " below " + std::to_string(want)};
}

inline Outcome oracle_equivalence(std::size_t budget) {
  need_budget(budget, 96);
  std::size_t groups = 0;
  std::vector<std::pair<PrimePowerModulus, std::size_t>> cases{{mod(2, 1), 0}, {mod(3, 1), 0}, {mod(2, 2), 32}};
  for (const auto& [m, max_order] : cases)
    for (const auto& g : exhaustive_subgroups(m, max_order)) {
      const Action act(g, budget);
      const CohomologyData d = compute_cohomology(act);
      const oracle::Result o = oracle::brute_force(g);
      auto pw = [&](std::uint64_t e) {
        std::uint64_t v = 1;
        while (e--) v *= m.p();
        return v;
      };
      if (pw(d.z1.log_order()) != o.z1_order || pw(d.b1.log_order()) != o.b1_order ||
          pw(d.z1_loc.log_order()) != o.z1_loc_order || d.h1 != o.h1 || d.h1_loc != o.h1_loc)
        return {false, "mismatch on " + reproduction_bundle(g)};
      ++groups;
    }
  return {true, std::to_string(groups) + " groups"};
}

inline Outcome local_routes(std::size_t budget) {
  need_budget(budget, 96);
  std::size_t groups = 0;
  for (const auto& m : {mod(2, 2), mod(5, 1)})
    for (const auto& g : exhaustive_subgroups(m, 40)) {
      const Action act(g, budget);
      if (local_cocycle_space(act).basis != local_cocycle_space_via_cyclic(act).basis)
        return {false, "routes differ on " + reproduction_bundle(g)};
      ++groups;
    }
  return {true, std::to_string(groups) + " groups"};
}

inline Outcome kills_h1(std::size_t budget, bool (*pred)(const Group&), std::uint64_t seed) {
  need_budget(budget);
  std::size_t hits = 0;
  for (const auto& m : {mod(3, 2), mod(5, 2), mod(7, 1)})
    for (const auto& g : mixed_sample(m, 150, seed, budget)) {
      if (!pred(g)) continue;
      ++hits;
      if (!h1(Action(g, budget)).trivial()) return {false, "H^1 nonzero on " + reproduction_bundle(g)};
    }
  if (!hits) return {false, "no sampled group met the hypothesis"};
  return {true, std::to_string(hits) + " groups"};
}

inline Outcome hensel_lift() {
  std::mt19937_64 eng(9);
  std::size_t done = 0;
  for (const auto& m : {mod(5, 2), mod(3, 3), mod(7, 3)}) {
    std::size_t local = 0;
    while (local < 60) {
      auto r = [&] { return static_cast<std::uint32_t>(eng() % m.q()); };
      const Mat2 b = Mat2::raw(r(), r(), r(), r(), m);
      if (!b.invertible()) continue;
      std::uint32_t l1 = r(), l2 = r();
      if (!m.is_unit(l1) || !m.is_unit(l2) || l1 % m.p() == l2 % m.p()) continue;
      const Group g = close({b * Mat2::diag(l1, l2, m) * b.inverse()}, m);
      auto lift = diagonal_rho_lift(g);
      if (!lift) return {false, "no lift for " + reproduction_bundle(g)};
      const Mat2& rn = lift->matrix;
      if (!rn.is_diagonal() || !lift->conjugated.contains(rn) || rn.order() != lift->g1.order_rho)
        return {false, "bad lift for " + reproduction_bundle(g)};
      for (std::uint32_t j = 1; j < m.n(); ++j) {
        auto lj = diagonal_rho_lift(reduce_mod(g, j));
        if (!lj || lj->matrix != rn.reduce(j)) return {false, "level mismatch for " + reproduction_bundle(g)};
      }
      ++local;
      ++done;
    }
  }
  return {true, std::to_string(done) + " lifts"};
}

inline Outcome eigen_split_rows() {
  const auto m = mod(5, 2);
  std::mt19937_64 eng(10);
  std::size_t done = 0;
  for (std::uint32_t l1 : {2u, 3u})
    for (std::uint32_t l2 : {1u, 4u}) {
      const Group g = close({Mat2::diag(m.pow(l1, 5), m.pow(l2, 5), m), Mat2::upper_unipotent(1, m)}, m);
      auto lift = diagonal_rho_lift(g);
      if (!lift) return {false, "no lift"};
      for (int t = 0; t < 50; ++t) {
        auto e = [&] { return static_cast<std::uint32_t>(5 * (eng() % 5)); };
        const Mat2 tau = Mat2::raw(1 + e(), e(), e(), 1 + e(), m);
        const EigenSplit s = eigen_split(tau);
        if (s.product() != tau || !certify_eigen_split(tau, s, *lift)) return {false, "split fails for tau"};
        ++done;
      }
    }
  return {true, std::to_string(done) + " splits"};
}

inline Outcome hn_decomposition(std::size_t budget) {
  std::size_t groups = 0, words = 0;
  for (const auto& g : normal_form_sample(mod(5, 2), 80, 11, std::max<std::size_t>(budget, 2000))) {
    auto lift = diagonal_rho_lift(g);
    if (!lift || lift->order < 3 || !lift->eigen_ratio_invertible()) continue;
    const Group hn = sylow_p(lift->conjugated);
    HnDecomposer dec(hn, *lift);
    for (const auto& tau : hn.elements()) {
      dec.decompose(tau);
      ++words;
    }
    ++groups;
  }
  if (!groups) return {false, "no eligible group sampled"};
  return {true, std::to_string(groups) + " groups, " + std::to_string(words) + " elements"};
}

inline Outcome commutator_formula(bool mutate) {
  std::mt19937_64 eng(12);
  std::size_t pairs = 0;
  for (const auto& m : {mod(2, 2), mod(3, 2), mod(5, 2), mod(3, 3)}) {
    auto unit = [&] {
      for (;;) {
        const auto v = static_cast<std::uint32_t>(eng() % m.q());
        if (m.is_unit(v)) return v;
      }
    };
    for (int t = 0; t < 2000; ++t) {
      const Mat2 x = Mat2::raw(unit(), static_cast<std::uint32_t>(eng() % m.q()), 0, unit(), m);
      const Mat2 y = Mat2::raw(unit(), static_cast<std::uint32_t>(eng() % m.q()), 0, unit(), m);
      const Mat2 direct = x * y * x.inverse() * y.inverse();
      const Mat2 formula = mutate ? upper_commutator_formula_mutated(x, y) : upper_commutator_formula(x, y);
      if (direct != formula) return {false, "formula disagrees with direct product over Z/" + std::to_string(m.q())};
      ++pairs;
    }
    // derived subgroups of the full upper and lower triangular groups
    std::vector<Mat2> up{Mat2::upper_unipotent(1, m)}, low{Mat2::lower_unipotent(1, m)};
    for (std::uint32_t u = 1; u < m.q(); ++u)
      if (m.is_unit(u)) {
        up.push_back(Mat2::diag(u, 1, m));
        up.push_back(Mat2::diag(1, u, m));
        low.push_back(Mat2::diag(u, 1, m));
        low.push_back(Mat2::diag(1, u, m));
      }
    const Group du = derived_subgroup(close(up, m)), dl = derived_subgroup(close(low, m));
    if (!du.is_cyclic() || !unipotent_cyclic_level(du) || !dl.is_cyclic() || !unipotent_cyclic_level(dl, true))
      return {false, "derived subgroup not cyclic unipotent over Z/" + std::to_string(m.q())};
  }
  return {true, std::to_string(pairs) + " pairs"};
}

inline Outcome sah(std::size_t budget) {
  need_budget(budget);
  std::mt19937_64 eng(13);
  std::size_t triples = 0, invertible = 0;
  for (const auto& g : mixed_sample(mod(5, 2), 60, 13, budget)) {
    const Action act(g, budget);
    const CocycleSpace z = cocycle_space(act);
    const std::vector<Mat2> central = center(g);
    const Mat2& alpha = central[eng() % central.size()];
    RawVector coeff;
    for (std::size_t i = 0; i < z.generator_count(); ++i) coeff.push_back(static_cast<std::uint32_t>(eng() % 25));
    const Cocycle c = z.generator_count() ? Cocycle::from_row(z.basis.matrix.left_apply(coeff), g.modulus())
                                          : Cocycle{g.modulus(), std::vector<Vec2>(g.order(), Vec2{0, 0})};
    sah_annihilate(act, alpha, c);
    ++triples;
    if ((alpha - Mat2::identity(g.modulus())).invertible()) {
      ++invertible;
      if (!h1(act).trivial()) return {false, "alpha - 1 invertible but H^1 nonzero on " + reproduction_bundle(g)};
    }
  }
  return {true, std::to_string(triples) + " triples, " + std::to_string(invertible) + " with alpha - 1 invertible"};
}

inline Outcome proposition16(std::size_t budget) {
  need_budget(budget);
  std::size_t ran = 0, glued = 0;
  for (const auto& g : normal_form_sample(mod(5, 2), 80, 14, budget)) {
    const Prop16Report r = proposition16_suite(g, budget);
    if (r.ran) ++ran;
    if (r.gluing_checked) ++glued;
  }
  if (!ran) return {false, "no eligible group sampled"};
  return {true, std::to_string(ran) + " groups, " + std::to_string(glued) + " gluing checks"};
}

inline Outcome proposition8(std::size_t budget) {
  need_budget(budget);
  const auto m = mod(5, 2);
  const std::uint32_t two = m.pow(2, 5), four = m.pow(4, 5);
  std::vector<Group> groups{close({Mat2::diag(two, four, m), Mat2::upper_unipotent(1, m)}, m),
                            close({Mat2::diag(two, 1, m), Mat2::upper_unipotent(1, m)}, m)};
  for (auto& g : normal_form_sample(m, 120, 15, budget)) groups.push_back(std::move(g));
  std::size_t c1 = 0, c2 = 0, second_shape = 0;
  for (const auto& g : groups) {
    const Prop8Verdict v = proposition8_verdict(g, budget);
    if (v.which == Prop8Case::eigenvalues_nontrivial) ++c1;
    if (v.which == Prop8Case::noncyclic_fixed_second) ++c2;
    // the second case's shape, whether or not H^1 vanishes
    const HypothesisReport h = hypothesis_report(g);
    if (h.g1.in_normal_form() && h.order_rho >= 3 && !h.g1_cyclic && h.lambda2 == 1) {
      ++second_shape;
      if (!v.verdict.h1_loc.trivial()) return {false, "second-case shape with H^1_loc != 0: " + reproduction_bundle(g)};
    }
  }
  if (!c1) return {false, "first case never exercised"};
  return {true, std::to_string(c1) + " first-case groups, " + std::to_string(c2) + " second-case groups with H^1 != 0, " +
                    std::to_string(second_shape) + " of second-case shape"};
}

inline Outcome sentinel(std::size_t budget) {
  need_budget(budget);
  std::size_t groups = 0, unchecked = 0, applicable = 0;
  auto absorb = [&](const ScanResult& r) {
    groups += r.summary.records;
    unchecked += r.summary.unchecked;
    applicable += r.summary.applicable;
  };
  for (auto [p, n] : {std::pair{2u, 2u}, {3u, 1u}, {5u, 1u}}) {
    ScanOptions o;
    o.p = p;
    o.n = n;
    o.budget = budget;
    absorb(run_scan(o));
  }
  for (auto [p, n] : {std::pair{3u, 2u}, {5u, 2u}}) {
    ScanOptions o;
    o.p = p;
    o.n = n;
    o.mode = ScanMode::sample;
    o.count = 150;
    o.seed = 16;
    o.budget = budget;
    absorb(run_scan(o));
  }
  return {true, std::to_string(groups) + " groups, " + std::to_string(applicable) + " applicable, " +
                    std::to_string(unchecked) + " over budget"};
}

inline Outcome z4_witness(std::size_t budget) {
  need_budget(budget, 96);
  ScanOptions o;
  o.p = 2;
  o.n = 2;
  o.budget = budget;
  const ScanResult r = run_scan(o);
  std::size_t witnesses = 0;
  for (const auto& rec : r.records) {
    if (rec.h1_loc.trivial()) continue;
    ++witnesses;
    if (rec.applicable) return {false, "witness satisfies every hypothesis"};
  }
  if (!witnesses) return {false, "no nontrivial local class found"};
  return {true, std::to_string(witnesses) + " subgroups with nontrivial H^1_loc"};
}

inline Outcome constants_row() {
  const ConstantsTable d1 = constants(1), d2 = constants(2), d3 = constants(3);
  const bool ok = d1.c == 7u && d1.s_tilde == std::vector<std::uint32_t>{2, 3, 5, 7} && d2.c == 13u &&
                  d2.quadratic_set == std::vector<std::uint32_t>{2, 3, 5, 7, 11, 13} && !d3.c && d3.p0_bound == 7;
  return {ok, ok ? "C(1) = 7, C(2) = 13" : "constant table mismatch"};
}

}  // namespace suite

inline std::vector<SuiteRow> run_verify(const VerifyOptions& opt) {
  using suite::Outcome;
  const std::size_t b = opt.budget;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> rows{
      {"cohomology-vs-brute-force", [&] { return suite::oracle_equivalence(b); }},
      {"local-cohomology-routes", [&] { return suite::local_routes(b); }},
      {"nontrivial-scalar-kills-h1", [&] { return suite::kills_h1(b, &has_nontrivial_scalar, 21); }},
      {"noncyclic-diagonal-kills-h1", [&] { return suite::kills_h1(b, &diag_noncyclic, 22); }},
      {"hensel-diagonal-lift", [] { return suite::hensel_lift(); }},
      {"eigen-split", [] { return suite::eigen_split_rows(); }},
      {"sylow-decomposition", [&] { return suite::hn_decomposition(b); }},
      {"commutator-formula", [&] { return suite::commutator_formula(opt.mutate_commutator); }},
      {"sah-annihilation", [&] { return suite::sah(b); }},
      {"triangular-local-cohomology", [&] { return suite::proposition16(b); }},
      {"two-case-local-vanishing", [&] { return suite::proposition8(b); }},
      {"local-vanishing-sentinel", [&] { return suite::sentinel(b); }},
      {"z4-counterexample-witness", [&] { return suite::z4_witness(b); }},
      {"constants", [] { return suite::constants_row(); }},
  };
  std::vector<SuiteRow> out;
  for (const auto& [name, body] : rows) {
    SuiteRow row{name, RowStatus::pass, ""};
    try {
      const Outcome o = body();
      row.status = o.ok ? RowStatus::pass : RowStatus::fail;
      row.detail = o.detail;
    } catch (const suite::Skip& s) {
      row.status = RowStatus::skipped;
      row.detail = s.why;
    } catch (const Falsification& e) {
      row.status = RowStatus::fail;
      row.detail = std::string(e.what()) + " " + e.bundle();
    } catch (const Error& e) {
      row.status = RowStatus::fail;
      row.detail = e.what();
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace h1loc
