#pragma once

// First cohomology of a finite G <= GL_2(Z/p^nZ) with coefficients in
// M = (Z/p^nZ)^2 under the natural action.
//
// A 1-cochain is stored as a row vector of length 2|G|: coordinates 2i and
// 2i+1 hold Z_x for x = group.elements()[i]. Z^1, B^1 and the local cocycles
// are Howell bases inside that ambient module.

#include <optional>
#include <string>
#include <vector>

#include "h1loc/group.hpp"
#include "h1loc/linalg.hpp"

namespace h1loc {

inline constexpr std::size_t kDefaultCohomologyBudget = 2000;

/// G acting on (Z/p^nZ)^2 by matrix-vector product.
class Action {
 public:
  explicit Action(Group g, std::size_t budget = kDefaultCohomologyBudget)
      : group_(std::move(g)), budget_(budget) {}

  const Group& group() const noexcept { return group_; }
  const PrimePowerModulus& modulus() const noexcept { return group_.modulus(); }
  std::size_t budget() const noexcept { return budget_; }
  /// Length of a cochain vector.
  std::size_t cochain_dim() const noexcept { return 2 * group_.order(); }

  bool within_budget() const noexcept { return group_.order() <= budget_; }
  void require_budget() const {
    if (!within_budget())
      throw BudgetExceeded("group of order " + std::to_string(group_.order()) +
                           " exceeds the cohomology budget of " + std::to_string(budget_));
  }

 private:
  Group group_;
  std::size_t budget_;
};

struct Cocycle {
  PrimePowerModulus modulus;
  std::vector<Vec2> values;  // indexed like the group's elements

  RawVector as_row() const {
    RawVector r;
    r.reserve(2 * values.size());
    for (const auto& v : values) {
      r.push_back(v[0]);
      r.push_back(v[1]);
    }
    return r;
  }
  static Cocycle from_row(std::span<const std::uint32_t> row, PrimePowerModulus mod) {
    Cocycle z{mod, {}};
    for (std::size_t i = 0; i + 1 < row.size(); i += 2) z.values.push_back({row[i], row[i + 1]});
    return z;
  }
  bool is_zero() const {
    for (const auto& v : values)
      if (v[0] || v[1]) return false;
    return true;
  }
  friend bool operator==(const Cocycle&, const Cocycle&) = default;
};

struct CocycleSpace {
  HowellBasis basis;

  std::uint64_t log_order() const noexcept { return basis.log_order(); }
  std::size_t generator_count() const noexcept { return basis.rank(); }
  Cocycle generator(std::size_t i) const {
    return Cocycle::from_row(basis.matrix.row(i), basis.modulus());
  }
};

/// Per-element witnesses W_x with Z_x = (x - 1) W_x.
struct LocalWitness {
  std::vector<Vec2> witnesses;
};

namespace detail {

inline Vec2 vec_add(const Vec2& a, const Vec2& b, const PrimePowerModulus& m) {
  return {m.add(a[0], b[0]), m.add(a[1], b[1])};
}
inline Vec2 vec_sub(const Vec2& a, const Vec2& b, const PrimePowerModulus& m) {
  return {m.sub(a[0], b[0]), m.sub(a[1], b[1])};
}

/// Cocycle values as linear functions of the generator values u in M^k: for
/// element i, rows 2i and 2i+1 of `a` are the two coordinates of Z_x as
/// functionals on the 2k coordinates of u, propagated along the closure tree.
struct GeneratorParametrization {
  std::size_t k = 0;
  std::vector<RawVector> a;  // 2|G| functionals of length 2k

  RawVector functional(std::size_t elem, int coord) const { return a[2 * elem + coord]; }
};

inline GeneratorParametrization parametrize(const Group& g) {
  const auto& mod = g.modulus();
  GeneratorParametrization par;
  par.k = g.generators().size();
  const std::size_t w = 2 * par.k;
  par.a.assign(2 * g.order(), RawVector(w, 0));
  for (std::size_t i = 1; i < g.order(); ++i) {
    const std::size_t gi = g.tree_gen(i), x = g.tree_parent(i);
    const Mat2& h = g.generators()[gi];
    // Z_{h x} = Z_h + h Z_x
    for (int r = 0; r < 2; ++r) {
      RawVector& out = par.a[2 * i + r];
      for (std::size_t c = 0; c < w; ++c)
        out[c] = mod.add(mod.mul(h.entry(r, 0), par.a[2 * x][c]), mod.mul(h.entry(r, 1), par.a[2 * x + 1][c]));
      out[2 * gi + r] = mod.add(out[2 * gi + r], 1 % mod.q());
    }
  }
  return par;
}

/// Functionals (columns of the constraint matrix) expressing the cocycle
/// identity Z_{hx} = Z_h + h Z_x for every generator h and every x.
inline std::vector<RawVector> cocycle_constraints(const Group& g, const GeneratorParametrization& par) {
  const auto& mod = g.modulus();
  const std::size_t w = 2 * par.k;
  std::vector<RawVector> cons;
  for (std::size_t x = 0; x < g.order(); ++x) {
    for (std::size_t gi = 0; gi < par.k; ++gi) {
      const Mat2& h = g.generators()[gi];
      const std::size_t y = *g.index_of_key(h.mul_unchecked(g[x]).key());
      for (int r = 0; r < 2; ++r) {
        RawVector f = par.a[2 * y + r];
        for (std::size_t c = 0; c < w; ++c) {
          std::uint32_t hz = mod.add(mod.mul(h.entry(r, 0), par.a[2 * x][c]), mod.mul(h.entry(r, 1), par.a[2 * x + 1][c]));
          f[c] = mod.sub(f[c], hz);
        }
        f[2 * gi + r] = mod.sub(f[2 * gi + r], 1 % mod.q());
        if (!row_is_zero(f)) cons.push_back(std::move(f));
      }
    }
  }
  return cons;
}

/// Functionals imposing Z_x in Im(x - 1) for every x: the image of x - 1 is the
/// annihilator of the left kernel of x - 1 (Z/p^nZ is self-injective).
inline std::vector<RawVector> local_constraints(const Group& g, const GeneratorParametrization& par) {
  const auto& mod = g.modulus();
  const std::size_t w = 2 * par.k;
  std::vector<RawVector> cons;
  for (std::size_t x = 0; x < g.order(); ++x) {
    const Mat2 d = g[x] - Mat2::identity(mod);
    ModMatrix dm = ModMatrix::from_rows({{d.a(), d.b()}, {d.c(), d.d()}}, mod);
    HowellBasis ann = kernel(dm);
    for (std::size_t i = 0; i < ann.rank(); ++i) {
      RawVector f(w, 0);
      const std::uint32_t w0 = ann.matrix(i, 0), w1 = ann.matrix(i, 1);
      for (std::size_t c = 0; c < w; ++c)
        f[c] = mod.add(mod.mul(w0, par.a[2 * x][c]), mod.mul(w1, par.a[2 * x + 1][c]));
      if (!row_is_zero(f)) cons.push_back(std::move(f));
    }
  }
  return cons;
}

/// Solutions u of all constraints, lifted to full cochain vectors.
inline HowellBasis solve_and_lift(const Group& g, const GeneratorParametrization& par,
                                  const std::vector<RawVector>& cons) {
  const auto& mod = g.modulus();
  const std::size_t w = 2 * par.k;
  ModMatrix m(w, cons.size(), mod);
  for (std::size_t j = 0; j < cons.size(); ++j)
    for (std::size_t r = 0; r < w; ++r) m.set(r, j, cons[j][r]);
  HowellBasis sol = kernel(m);
  std::vector<RawVector> rows;
  for (std::size_t i = 0; i < sol.rank(); ++i) {
    auto u = sol.matrix.row(i);
    RawVector z(2 * g.order(), 0);
    for (std::size_t e = 0; e < 2 * g.order(); ++e) {
      std::uint64_t acc = 0;
      for (std::size_t c = 0; c < w; ++c) acc += std::uint64_t{par.a[e][c]} * u[c] % mod.q();
      z[e] = static_cast<std::uint32_t>(acc % mod.q());
    }
    rows.push_back(std::move(z));
  }
  return howell_from_rows(std::move(rows), 2 * g.order(), mod);
}

/// Rows j = 0, 1: the coboundary of W = e_j, i.e. x -> (x - 1) e_j.
inline ModMatrix coboundary_matrix(const Group& g) {
  const auto& mod = g.modulus();
  ModMatrix m(2, 2 * g.order(), mod);
  for (std::size_t i = 0; i < g.order(); ++i) {
    const Mat2 d = g[i] - Mat2::identity(mod);
    for (int r = 0; r < 2; ++r)
      for (int j = 0; j < 2; ++j) m.set(j, 2 * i + r, d.entry(r, j));
  }
  return m;
}

}  // namespace detail

/// Z^1 from the generator-indexed system {Z_{hx} = Z_h + h Z_x}.
inline CocycleSpace cocycle_space(const Action& act) {
  act.require_budget();
  const Group& g = act.group();
  auto par = detail::parametrize(g);
  return {detail::solve_and_lift(g, par, detail::cocycle_constraints(g, par))};
}

/// B^1 = {x -> (x - 1) W}.
inline CocycleSpace coboundary_space(const Action& act) {
  act.require_budget();
  return {howell_form(detail::coboundary_matrix(act.group()))};
}

/// Cocycles satisfying the local conditions: Z_x in Im(x - 1) for every x.
inline CocycleSpace local_cocycle_space(const Action& act) {
  act.require_budget();
  const Group& g = act.group();
  auto par = detail::parametrize(g);
  auto cons = detail::cocycle_constraints(g, par);
  auto loc = detail::local_constraints(g, par);
  cons.insert(cons.end(), loc.begin(), loc.end());
  return {detail::solve_and_lift(g, par, cons)};
}

inline QuotientInvariants h1(const Action& act) {
  return quotient_invariants(coboundary_space(act).basis, cocycle_space(act).basis);
}

inline QuotientInvariants h1_loc(const Action& act) {
  return quotient_invariants(coboundary_space(act).basis, local_cocycle_space(act).basis);
}

/// Everything computed at once, sharing the parametrization.
struct CohomologyData {
  CocycleSpace z1;
  CocycleSpace b1;
  CocycleSpace z1_loc;
  QuotientInvariants h1;
  QuotientInvariants h1_loc;
};

inline CohomologyData compute_cohomology(const Action& act) {
  act.require_budget();
  const Group& g = act.group();
  auto par = detail::parametrize(g);
  auto cons = detail::cocycle_constraints(g, par);
  CocycleSpace z1{detail::solve_and_lift(g, par, cons)};
  CocycleSpace b1{howell_form(detail::coboundary_matrix(g))};
  auto loc = detail::local_constraints(g, par);
  cons.insert(cons.end(), loc.begin(), loc.end());
  CocycleSpace zl{detail::solve_and_lift(g, par, cons)};
  auto h = quotient_invariants(b1.basis, z1.basis);
  auto hl = quotient_invariants(b1.basis, zl.basis);
  return {std::move(z1), std::move(b1), std::move(zl), std::move(h), std::move(hl)};
}

/// Local cocycles computed the other way: the intersection over all cyclic
/// subgroups C of the cocycles whose restriction to C is a coboundary of C.
inline CocycleSpace local_cocycle_space_via_cyclic(const Action& act) {
  act.require_budget();
  const Group& g = act.group();
  const auto& mod = g.modulus();
  HowellBasis current = cocycle_space(act).basis;
  for (const Group& c : cyclic_subgroups(g)) {
    if (current.is_zero()) break;
    std::vector<std::size_t> pos;
    for (const auto& x : c.elements()) pos.push_back(*g.index_of(x));
    const std::size_t r = current.rank();
    std::vector<RawVector> stacked;
    for (std::size_t i = 0; i < r; ++i) {
      RawVector res;
      for (auto e : pos) {
        res.push_back(current.matrix(i, 2 * e));
        res.push_back(current.matrix(i, 2 * e + 1));
      }
      stacked.push_back(std::move(res));
    }
    ModMatrix bc = detail::coboundary_matrix(c);
    for (std::size_t j = 0; j < 2; ++j) stacked.push_back(bc.row_vector(j));
    HowellBasis ker = kernel(ModMatrix::from_raw_rows(stacked, 2 * c.order(), mod));
    std::vector<RawVector> next;
    for (std::size_t i = 0; i < ker.rank(); ++i) {
      RawVector coeff(ker.matrix.row(i).begin(), ker.matrix.row(i).begin() + static_cast<std::ptrdiff_t>(r));
      next.push_back(current.matrix.left_apply(coeff));
    }
    current = detail::howell_from_rows(std::move(next), act.cochain_dim(), mod);
  }
  return {current};
}

inline QuotientInvariants h1_loc_via_cyclic(const Action& act) {
  return quotient_invariants(coboundary_space(act).basis, local_cocycle_space_via_cyclic(act).basis);
}

/// Checks Z_{xy} = Z_x + x Z_y over all pairs.
inline bool is_cocycle(const Group& g, const Cocycle& z) {
  const auto& mod = g.modulus();
  if (z.values.size() != g.order()) return false;
  for (std::size_t i = 0; i < g.order(); ++i)
    for (std::size_t j = 0; j < g.order(); ++j) {
      const std::size_t ij = *g.index_of_key(g[i].mul_unchecked(g[j]).key());
      if (z.values[ij] != detail::vec_add(z.values[i], g[i].apply(z.values[j]), mod)) return false;
    }
  return true;
}

/// W with Z_x = (x - 1) W for all x, if Z is a coboundary.
inline std::optional<Vec2> coboundary_witness(const Group& g, const Cocycle& z) {
  auto w = solve_left(detail::coboundary_matrix(g), z.as_row());
  if (!w) return std::nullopt;
  return Vec2{(*w)[0], (*w)[1]};
}

inline Cocycle coboundary_of(const Group& g, const Vec2& w) {
  Cocycle z{g.modulus(), {}};
  for (const auto& x : g.elements()) z.values.push_back(detail::vec_sub(x.apply(w), w, g.modulus()));
  return z;
}

/// Witnesses for the local conditions, or nullopt if some Z_x is outside Im(x - 1).
inline std::optional<LocalWitness> local_witness(const Group& g, const Cocycle& z) {
  const auto& mod = g.modulus();
  LocalWitness lw;
  for (std::size_t i = 0; i < g.order(); ++i) {
    const Mat2 d = g[i] - Mat2::identity(mod);
    // W^T (x-1)^T = Z_x^T
    ModMatrix dt = ModMatrix::from_rows({{d.a(), d.c()}, {d.b(), d.d()}}, mod);
    auto w = solve_left(dt, z.values[i]);
    if (!w) return std::nullopt;
    lw.witnesses.push_back({(*w)[0], (*w)[1]});
  }
  return lw;
}

/// Restriction of a cocycle on g to the subgroup `sub`, indexed like sub.
inline Cocycle restrict(const Group& g, const Cocycle& z, const Group& sub) {
  Cocycle r{g.modulus(), {}};
  for (const auto& x : sub.elements()) {
    auto i = g.index_of(x);
    if (!i) throw PreconditionFailed("restrict: argument is not a subgroup of the cocycle's group");
    r.values.push_back(z.values[*i]);
  }
  return r;
}

/// x -> (alpha - 1) Z_x for central alpha. The result is checked to be a
/// coboundary; a failure throws Falsification.
inline Cocycle sah_annihilate(const Action& act, const Mat2& alpha, const Cocycle& z) {
  const Group& g = act.group();
  const auto& mod = g.modulus();
  for (const auto& y : g.generators())
    if (alpha * y != y * alpha) throw PreconditionFailed("sah_annihilate: alpha is not central");
  const Mat2 am1 = alpha - Mat2::identity(mod);
  Cocycle out{mod, {}};
  for (const auto& v : z.values) out.values.push_back(am1.apply(v));
  if (!coboundary_witness(g, out))
    throw Falsification("sah_annihilate: (alpha - 1) Z is not a coboundary", "");
  return out;
}

}  // namespace h1loc
