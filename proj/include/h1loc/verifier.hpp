#pragma once

// Hypotheses and conclusions of the local-global results as predicates on
// concrete matrix groups.

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "h1loc/cohomology.hpp"
#include "h1loc/decompose.hpp"
#include "h1loc/lift.hpp"

namespace h1loc {

/// Some nonzero v in (Z/pZ)^2 is fixed by the whole mod-p image.
inline bool fixed_point_exact_order_p(const Group& g) {
  const Group g1 = reduce_mod(g, 1);
  const auto& m = g1.modulus();
  for (std::uint32_t x = 0; x < m.p(); ++x)
    for (std::uint32_t y = 0; y < m.p(); ++y) {
      if (!x && !y) continue;
      const Vec2 v{x, y};
      bool fixed = true;
      for (const auto& s : g1.generators())
        if (s.apply(v) != v) {
          fixed = false;
          break;
        }
      if (fixed) return true;
    }
  return false;
}

/// Some line of (Z/pZ)^2 is mapped to itself by the mod-p image.
inline bool stabilizes_line_mod_p(const Group& g) {
  const Group g1 = reduce_mod(g, 1);
  const auto& m = g1.modulus();
  auto stable = [&](const Vec2& v) {
    for (const auto& s : g1.generators()) {
      const Vec2 w = s.apply(v);
      // w is a multiple of v iff det[v w] = 0
      if (m.sub(m.mul(v[0], w[1]), m.mul(v[1], w[0])) != 0) return false;
    }
    return true;
  };
  if (stable({0, 1})) return true;
  for (std::uint32_t t = 0; t < m.p(); ++t)
    if (stable({1, t})) return true;
  return false;
}

/// The mod-p image contains alpha I with alpha != 1.
inline bool has_nontrivial_scalar(const Group& g) {
  const Group g1 = reduce_mod(g, 1);
  for (const auto& x : g1.elements())
    if (x.is_scalar() && !x.is_identity()) return true;
  return false;
}

/// The diagonal matrices of the mod-p image (in the given basis) do not form a cyclic group.
inline bool diag_noncyclic(const Group& g) {
  const Group g1 = reduce_mod(g, 1);
  return !filter_subgroup(g1, &Mat2::is_diagonal).is_cyclic();
}

struct HypothesisReport {
  G1Classification g1;
  std::uint64_t order_rho = 0;
  std::uint32_t lambda1 = 0;
  std::uint32_t lambda2 = 0;
  bool has_fixed_point_exact_order_p = false;
  bool stabilizes_line_mod_p = false;
  bool has_nontrivial_scalar = false;
  bool diag_noncyclic = false;
  bool g1_cyclic = false;
};

inline HypothesisReport hypothesis_report(const Group& g) {
  HypothesisReport r;
  const Group g1 = reduce_mod(g, 1);
  r.g1 = classify_g1(g1);
  r.order_rho = r.g1.order_rho;
  r.lambda1 = r.g1.lambda1;
  r.lambda2 = r.g1.lambda2;
  r.has_fixed_point_exact_order_p = fixed_point_exact_order_p(g);
  r.stabilizes_line_mod_p = stabilizes_line_mod_p(g);
  r.has_nontrivial_scalar = has_nontrivial_scalar(g);
  r.diag_noncyclic = diag_noncyclic(g);
  r.g1_cyclic = g1.is_cyclic();
  return r;
}

struct TheoremVerdict {
  bool checked = false;  // false when the cohomology budget was exceeded
  bool applicable = false;
  bool conclusion_checked = false;  // H^1_loc computed trivial
  QuotientInvariants h1;
  QuotientInvariants h1_loc;
  std::vector<std::string> violated_hypotheses;
  std::string note;
};

inline std::string reproduction_bundle(const Group& g, const std::optional<Cocycle>& z = std::nullopt) {
  std::ostringstream os;
  os << "{\"p\":" << g.modulus().p() << ",\"n\":" << g.modulus().n() << ",\"generators\":[";
  for (std::size_t i = 0; i < g.generators().size(); ++i) {
    const auto& x = g.generators()[i];
    os << (i ? "," : "") << "[[" << x.a() << ',' << x.b() << "],[" << x.c() << ',' << x.d() << "]]";
  }
  os << ']';
  if (z) {
    os << ",\"cocycle\":[";
    for (std::size_t i = 0; i < z->values.size(); ++i)
      os << (i ? "," : "") << '[' << z->values[i][0] << ',' << z->values[i][1] << ']';
    os << ']';
  }
  os << '}';
  return os.str();
}

/// A representative of a nontrivial local class, for reproduction bundles.
inline std::optional<Cocycle> nontrivial_local_representative(const Action& act, const CohomologyData& d) {
  for (std::size_t i = 0; i < d.z1_loc.generator_count(); ++i) {
    Cocycle z = d.z1_loc.generator(i);
    if (!contains(d.b1.basis, z.as_row())) return z;
  }
  (void)act;
  return std::nullopt;
}

/// Without a point of exact order p, and with rho of order at least 3 (or H^1
/// already trivial), H^1_loc vanishes. A contradiction throws Falsification.
inline TheoremVerdict theorem1_verdict(const Group& g, std::size_t budget = kDefaultCohomologyBudget,
                                       const HypothesisReport* known = nullptr) {
  TheoremVerdict v;
  Action act(g, budget);
  if (!act.within_budget()) {
    v.note = "group exceeds cohomology budget; not checked";
    return v;
  }
  const HypothesisReport hyp = known ? *known : hypothesis_report(g);
  const CohomologyData d = compute_cohomology(act);
  v.checked = true;
  v.h1 = d.h1;
  v.h1_loc = d.h1_loc;
  v.conclusion_checked = d.h1_loc.trivial();
  const bool strong_form = hyp.g1.in_normal_form() && hyp.order_rho >= 3;
  if (hyp.has_fixed_point_exact_order_p) v.violated_hypotheses.push_back("point of exact order p");
  if (!strong_form && !d.h1.trivial()) {
    v.violated_hypotheses.push_back(hyp.g1.in_normal_form() ? "order of rho below 3" : "mod-p image not in normal form");
  }
  v.applicable = v.violated_hypotheses.empty();
  if (v.applicable && d.h1.trivial()) v.note = "H^1 trivial";
  if (v.applicable && !v.conclusion_checked)
    throw Falsification("theorem1: hypotheses hold but H^1_loc = " + d.h1_loc.to_string(),
                        reproduction_bundle(g, nontrivial_local_representative(act, d)));
  return v;
}

enum class Prop8Case { eigenvalues_nontrivial, noncyclic_fixed_second, not_met };

inline const char* to_string(Prop8Case c) {
  switch (c) {
    case Prop8Case::eigenvalues_nontrivial: return "lambda1,lambda2 != 1";
    case Prop8Case::noncyclic_fixed_second: return "G1 non-cyclic, lambda2 = 1";
    case Prop8Case::not_met: return "hypotheses not met";
  }
  return "?";
}

struct Prop8Verdict {
  TheoremVerdict verdict;
  Prop8Case which = Prop8Case::not_met;
};

/// Requires H^1 != 0, normal form and order(rho) >= 3; then in either case
/// H^1_loc must vanish.
inline Prop8Verdict proposition8_verdict(const Group& g, std::size_t budget = kDefaultCohomologyBudget) {
  Prop8Verdict out;
  TheoremVerdict& v = out.verdict;
  Action act(g, budget);
  if (!act.within_budget()) {
    v.note = "group exceeds cohomology budget; not checked";
    return out;
  }
  const HypothesisReport hyp = hypothesis_report(g);
  const CohomologyData d = compute_cohomology(act);
  v.checked = true;
  v.h1 = d.h1;
  v.h1_loc = d.h1_loc;
  v.conclusion_checked = d.h1_loc.trivial();
  if (d.h1.trivial()) v.violated_hypotheses.push_back("H^1 trivial");
  if (!hyp.g1.in_normal_form()) v.violated_hypotheses.push_back("mod-p image not in normal form");
  else if (hyp.order_rho < 3) v.violated_hypotheses.push_back("order of rho below 3");
  if (v.violated_hypotheses.empty()) {
    if (hyp.lambda1 != 1 && hyp.lambda2 != 1)
      out.which = Prop8Case::eigenvalues_nontrivial;
    else if (!hyp.g1_cyclic && hyp.lambda2 == 1)
      out.which = Prop8Case::noncyclic_fixed_second;
    else
      v.violated_hypotheses.push_back("excluded: rational point of exact order p");
  }
  v.applicable = out.which != Prop8Case::not_met;
  if (!v.applicable) v.note = to_string(Prop8Case::not_met);
  if (v.applicable && !v.conclusion_checked)
    throw Falsification(std::string("proposition8 (") + to_string(out.which) + "): H^1_loc = " + d.h1_loc.to_string(),
                        reproduction_bundle(g, nontrivial_local_representative(act, d)));
  return out;
}

struct SubgroupCheck {
  std::string name;
  std::uint64_t order = 0;
  QuotientInvariants h1_loc;
  bool asserted = false;  // triviality is claimed for this subgroup
};

struct Prop16Report {
  bool ran = false;
  std::string skip_reason;
  std::vector<SubgroupCheck> checks;
  bool lower_unipotent_cyclic = false;
  bool gluing_checked = false;
  bool gluing_holds = false;
};

namespace detail {

inline Group join(const Mat2& x, const Group& h) {
  std::vector<Mat2> gens{x};
  for (const auto& y : h.generators()) gens.push_back(y);
  return close(gens, h.modulus());
}

/// Coboundary witness of z restricted to sub; nullopt when not a coboundary there.
inline std::optional<Vec2> restricted_witness(const Group& g, const Cocycle& z, const Group& sub) {
  return coboundary_witness(sub, restrict(g, z, sub));
}

}  // namespace detail

/// Witnesses P (on L_n, or <rho_n, sL_n> in the second case) and Q (on U_n)
/// for every generator of the local cocycles, checked to satisfy
/// (rho_n - I)(P - Q) = 0. Works in the basis of the lift.
inline bool gluing_check(const RhoLift& lift, bool second_case, std::size_t budget = kDefaultCohomologyBudget) {
  const Group& g = lift.conjugated;
  const auto& mod = g.modulus();
  const TriangularSlices s = triangular_slices(g);
  const Group left = second_case ? detail::join(lift.matrix, s.strict_lower) : s.lower;
  const Mat2 rm1 = lift.matrix - Mat2::identity(mod);
  Action act(g, budget);
  const CocycleSpace zl = local_cocycle_space(act);
  for (std::size_t i = 0; i < zl.generator_count(); ++i) {
    const Cocycle z = zl.generator(i);
    auto p = detail::restricted_witness(g, z, left);
    auto q = detail::restricted_witness(g, z, s.upper);
    if (!p || !q) return false;
    const Vec2 diff{mod.sub((*p)[0], (*q)[0]), mod.sub((*p)[1], (*q)[1])};
    const Vec2 img = rm1.apply(diff);
    if (img[0] || img[1]) return false;
  }
  return true;
}

/// Local cohomology of the triangular pieces. Parts one and two do not depend
/// on H^1(G) being nonzero and are asserted whenever their eigenvalue
/// hypotheses hold; part three is asserted only when H^1(G) != 0.
inline Prop16Report proposition16_suite(const Group& g, std::size_t budget = kDefaultCohomologyBudget) {
  Prop16Report r;
  auto lift = diagonal_rho_lift(g);
  if (!lift) {
    r.skip_reason = "no diagonal lift of rho (mod-p image not in normal form, or rho = I)";
    return r;
  }
  if (lift->order < 3) {
    r.skip_reason = "order of rho below 3";
    return r;
  }
  const Group& gc = lift->conjugated;
  if (gc.order() > budget) {
    r.skip_reason = "group exceeds cohomology budget";
    return r;
  }
  r.ran = true;
  const TriangularSlices s = triangular_slices(gc);
  const std::uint32_t l1 = lift->g1.lambda1, l2 = lift->g1.lambda2;
  const bool g1_cyclic = reduce_mod(gc, 1).is_cyclic();
  const bool h1_nonzero = !h1(Action(gc, budget)).trivial();

  auto run = [&](const std::string& name, const Group& sub, bool asserted) {
    SubgroupCheck c{name, sub.order(), h1_loc(Action(sub, budget)), asserted};
    if (asserted && !c.h1_loc.trivial())
      throw Falsification("proposition16: H^1_loc(" + name + ") = " + c.h1_loc.to_string(), reproduction_bundle(gc));
    r.checks.push_back(std::move(c));
  };

  r.lower_unipotent_cyclic = s.strict_lower.is_cyclic();
  run("sL_n", s.strict_lower, true);
  run("<rho_n, sU_n>", detail::join(lift->matrix, s.strict_upper), true);
  run("<rho_n, sL_n>", detail::join(lift->matrix, s.strict_lower), true);
  const bool both_nontrivial = l1 != 1 && l2 != 1;
  run("U_n", s.upper, both_nontrivial || (!g1_cyclic && l2 == 1 && h1_nonzero));
  run("L_n", s.lower, both_nontrivial);

  if (h1_nonzero && both_nontrivial) {
    r.gluing_checked = true;
    r.gluing_holds = gluing_check(*lift, false, budget);
  } else if (h1_nonzero && !g1_cyclic && l2 == 1) {
    r.gluing_checked = true;
    r.gluing_holds = gluing_check(*lift, true, budget);
  }
  if (r.gluing_checked && !r.gluing_holds)
    throw Falsification("proposition8 gluing: restrictions do not glue", reproduction_bundle(gc));
  return r;
}

struct ConstantsTable {
  std::uint32_t degree = 1;
  std::vector<std::uint32_t> s_set{2, 3, 5, 7, 11, 13, 17, 19, 37, 43, 67, 163};
  std::vector<std::uint32_t> s_tilde{2, 3, 5, 7};
  std::vector<std::uint32_t> quadratic_set{2, 3, 5, 7, 11, 13};
  std::optional<std::uint32_t> c;   // known value of the constant
  std::uint32_t p0_bound = 3;       // 2 d + 1
  std::uint32_t largest_prime_in_bound = 3;
  std::string symbolic;             // for degrees without a known constant
};

inline ConstantsTable constants(std::uint32_t degree) {
  if (degree < 1) throw PreconditionFailed("constants: degree must be >= 1");
  ConstantsTable t;
  t.degree = degree;
  t.p0_bound = 2 * degree + 1;
  for (std::uint32_t v = t.p0_bound; v >= 2; --v)
    if (is_prime(v)) {
      t.largest_prime_in_bound = v;
      break;
    }
  if (degree == 1) t.c = 7;
  else if (degree == 2) t.c = 13;
  else t.symbolic = "max{" + std::to_string(t.p0_bound) + ", Merel constant (unavailable)}";
  return t;
}

}  // namespace h1loc
