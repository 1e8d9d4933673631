#pragma once

// Factorization of elements of the Sylow p-subgroup H_n into diagonal,
// strictly upper and strictly lower triangular factors that stay inside H_n.
// All matrices are taken in the basis where rho_n is diagonal.

#include <sstream>
#include <unordered_map>
#include <vector>

#include "h1loc/lift.hpp"

namespace h1loc {

/// Top-right entry of x y x^-1 y^-1 for upper triangular x = (a b / 0 d),
/// y = (a' b' / 0 d'): (a b' - a' b + b d' - b' d) d^-1 d'^-1.
inline Mat2 upper_commutator_formula(const Mat2& x, const Mat2& y) {
  require_same_modulus(x.modulus(), y.modulus(), "upper_commutator_formula");
  if (!x.is_upper() || !y.is_upper()) throw PreconditionFailed("upper_commutator_formula: arguments must be upper triangular");
  const auto& m = x.modulus();
  std::uint32_t t = m.sub(m.mul(x.a(), y.b()), m.mul(y.a(), x.b()));
  t = m.add(t, m.sub(m.mul(x.b(), y.d()), m.mul(y.b(), x.d())));
  t = m.mul(t, m.inv(m.mul(x.d(), y.d())));
  return Mat2::upper_unipotent(t, m);
}

/// Deliberately wrong variant (sign of the last term flipped), used as a
/// negative control for the verification suite.
inline Mat2 upper_commutator_formula_mutated(const Mat2& x, const Mat2& y) {
  const auto& m = x.modulus();
  std::uint32_t t = m.sub(m.mul(x.a(), y.b()), m.mul(y.a(), x.b()));
  t = m.add(t, m.add(m.mul(x.b(), y.d()), m.mul(y.b(), x.d())));
  t = m.mul(t, m.inv(m.mul(x.d(), y.d())));
  return Mat2::upper_unipotent(t, m);
}

enum class FactorShape { diag, strict_upper, strict_lower };

inline const char* to_string(FactorShape s) {
  switch (s) {
    case FactorShape::diag: return "diag";
    case FactorShape::strict_upper: return "strict_upper";
    case FactorShape::strict_lower: return "strict_lower";
  }
  return "?";
}

inline bool has_shape(const Mat2& x, FactorShape s) {
  switch (s) {
    case FactorShape::diag: return x.is_diagonal();
    case FactorShape::strict_upper: return x.is_upper_unipotent();
    case FactorShape::strict_lower: return x.is_lower_unipotent();
  }
  return false;
}

struct Factor {
  Mat2 matrix;
  FactorShape shape;
};

struct FactorWord {
  std::vector<Factor> factors;

  Mat2 product(PrimePowerModulus mod) const {
    Mat2 r = Mat2::identity(mod);
    for (const auto& f : factors) r = r * f.matrix;
    return r;
  }
  std::size_t size() const noexcept { return factors.size(); }
  bool empty() const noexcept { return factors.empty(); }
};

/// tau = diag_a * diag_d * upper * lower for tau congruent to I mod p^(n-1).
/// These are the components of tau along the eigenvectors of conjugation by
/// rho_n on that (abelian, exponent p) kernel.
struct EigenSplit {
  Mat2 diag_a;  // (1 + p^(n-1) a, 0 / 0, 1)
  Mat2 diag_d;  // (1, 0 / 0, 1 + p^(n-1) d)
  Mat2 upper;   // (1, p^(n-1) b / 0, 1)
  Mat2 lower;   // (1, 0 / p^(n-1) c, 1)

  Mat2 product() const { return diag_a * diag_d * upper * lower; }
};

inline bool in_last_kernel(const Mat2& tau) {
  const auto& m = tau.modulus();
  const std::uint32_t t = m.pow_p(m.n() - 1);
  return m.sub(tau.a(), 1) % t == 0 && tau.b() % t == 0 && tau.c() % t == 0 && m.sub(tau.d(), 1) % t == 0;
}

inline EigenSplit eigen_split(const Mat2& tau) {
  const auto& m = tau.modulus();
  if (m.n() < 2) throw PreconditionFailed("eigen_split: needs n >= 2");
  if (!in_last_kernel(tau)) throw PreconditionFailed("eigen_split: tau is not congruent to I mod p^(n-1)");
  EigenSplit s{Mat2::diag(tau.a(), 1, m), Mat2::diag(1, tau.d(), m), Mat2::upper_unipotent(tau.b(), m),
               Mat2::lower_unipotent(tau.c(), m)};
  if (s.product() != tau) throw Error("eigen_split: factors do not reassemble tau");
  return s;
}

namespace detail {

/// x -> (rho x rho^-1) x^-e, i.e. (phi - e) written multiplicatively.
inline Mat2 phi_minus(const Mat2& x, const Mat2& rho, std::uint32_t e) {
  const auto& m = x.modulus();
  return rho * x * rho.inverse() * x.pow(m.neg(e));
}

}  // namespace detail

/// Rebuilds each component of tau from tau, conjugation by rho_n, products
/// and powers only, and checks it against the closed form. A passing check
/// means every component lies in any rho_n-stable group containing tau.
/// Requires lambda1^2 != lambda2^2 mod p.
inline bool certify_eigen_split(const Mat2& tau, const EigenSplit& s, const RhoLift& lift) {
  const auto& m = tau.modulus();
  if (!lift.eigen_ratio_invertible())
    throw PreconditionFailed("certify_eigen_split: lambda2/lambda1 - lambda1/lambda2 is not a unit");
  const Mat2& rho = lift.matrix;
  const std::uint32_t mu = lift.mu(), nu = lift.nu(), one = 1;
  auto component = [&](std::uint32_t e1, std::uint32_t e2, std::uint32_t eigen) {
    Mat2 y = detail::phi_minus(detail::phi_minus(tau, rho, e1), rho, e2);
    std::uint32_t scale = m.mul(m.sub(eigen, e1), m.sub(eigen, e2));
    return y.pow(m.inv(scale));
  };
  return component(mu, nu, one) == s.diag_a * s.diag_d && component(one, nu, mu) == s.upper &&
         component(one, mu, nu) == s.lower;
}

/// Decomposition of elements of H_n, level by level.
class HnDecomposer {
 public:
  /// `hn` must be the Sylow p-subgroup of lift.conjugated (same basis).
  HnDecomposer(const Group& hn, const RhoLift& lift) : lift_(lift) {
    const auto& mod = hn.modulus();
    require_same_modulus(mod, lift.modulus(), "HnDecomposer");
    if (lift.order < 3) throw PreconditionFailed("decompose_in_Hn: order of rho is below 3");
    if (!lift.eigen_ratio_invertible())
      throw PreconditionFailed("decompose_in_Hn: lambda2/lambda1 - lambda1/lambda2 is not a unit");
    const Mat2 ri = lift.matrix.inverse();
    for (const auto& h : hn.generators())
      if (!hn.contains(lift.matrix * h * ri)) throw PreconditionFailed("decompose_in_Hn: H_n is not normalized by rho_n");
    for (std::uint32_t j = 1; j <= mod.n(); ++j) {
      Level lv{reduce_mod(hn, j), lift.matrix.reduce(j), {}};
      if (j > 1) {
        for (const auto& x : lv.group.elements()) lv.lifts.emplace(x.reduce(j - 1).key(), x);
      }
      levels_.push_back(std::move(lv));
    }
  }

  FactorWord decompose(const Mat2& tau) const {
    const auto& mod = lift_.modulus();
    require_same_modulus(tau.modulus(), mod, "decompose_in_Hn");
    if (!levels_.back().group.contains(tau)) throw PreconditionFailed("decompose_in_Hn: tau is not in H_n");
    FactorWord w = decompose_at(tau, mod.n());
    certify(w, tau, mod.n());
    return w;
  }

 private:
  struct Level {
    Group group;
    Mat2 rho;
    std::unordered_map<std::uint64_t, Mat2> lifts;  // first element over each class mod p^(j-1)
  };

  [[noreturn]] void fail(const std::string& what, const Mat2& tau) const {
    std::ostringstream b;
    b << "tau=" << tau << " rho_n=" << lift_.matrix << " basis=" << lift_.basis_change;
    throw Falsification("decompose_in_Hn: " + what, b.str());
  }

  void certify(const FactorWord& w, const Mat2& tau, std::uint32_t j) const {
    const Group& h = levels_[j - 1].group;
    for (const auto& f : w.factors) {
      if (!has_shape(f.matrix, f.shape)) fail("factor has the wrong shape", tau);
      if (!h.contains(f.matrix)) fail("factor is not in H_n", tau);
    }
    if (w.product(h.modulus()) != tau) fail("factors do not reassemble tau", tau);
  }

  static void push(FactorWord& w, const Mat2& x, FactorShape s) {
    if (!x.is_identity()) w.factors.push_back({x, s});
  }

  FactorWord decompose_at(const Mat2& tau, std::uint32_t j) const {
    FactorWord w;
    if (j == 1) {
      if (tau.is_identity()) return w;
      if (!tau.is_upper_unipotent()) throw PreconditionFailed("decompose_in_Hn: H_1 is not strictly upper triangular");
      push(w, tau, FactorShape::strict_upper);
      return w;
    }
    const Level& lv = levels_[j - 1];
    const auto& mod = lv.group.modulus();
    FactorWord below = decompose_at(tau.reduce(j - 1), j - 1);
    std::vector<Factor> lifted;
    Mat2 prod = Mat2::identity(mod);
    for (const auto& f : below.factors) {
      auto it = lv.lifts.find(f.matrix.key());
      if (it == lv.lifts.end()) fail("no lift of a factor to the next level", tau);
      lifted.push_back({it->second, f.shape});
      prod = prod * it->second;
    }
    // tau = rest * prod, with rest congruent to I mod p^(j-1)
    const Mat2 rest = tau * prod.inverse();
    append(w, reduces_to_diagonal(rest, lv));
    for (const auto& f : lifted) {
      switch (f.shape) {
        case FactorShape::diag: append(w, reduces_to_diagonal(f.matrix, lv)); break;
        case FactorShape::strict_lower: append(w, reduces_to_lower(f.matrix, lv)); break;
        case FactorShape::strict_upper: append(w, reduces_to_upper(f.matrix, lv)); break;
      }
    }
    certify(w, tau, j);
    return w;
  }

  static void append(FactorWord& w, const FactorWord& v) {
    w.factors.insert(w.factors.end(), v.factors.begin(), v.factors.end());
  }

  std::uint32_t mu(const PrimePowerModulus& m) const { return m.reduce(lift_.mu()); }
  std::uint32_t nu(const PrimePowerModulus& m) const { return m.reduce(lift_.nu()); }

  // (1+pa, p^(j-1)b / p^(j-1)c, 1+pd) = D * (1 p^(j-1)b / 0 1) * (1 0 / p^(j-1)c 1)
  FactorWord reduces_to_diagonal(const Mat2& tau, const Level& lv) const {
    const auto& m = tau.modulus();
    const Mat2& rho = lv.rho;
    const Mat2 kappa = rho * tau * rho.inverse() * tau.inverse();
    const EigenSplit ks = eigen_split(kappa);
    const Mat2 u = ks.upper.pow(m.inv(m.sub(mu(m), 1)));
    const Mat2 l = ks.lower.pow(m.inv(m.sub(nu(m), 1)));
    const Mat2 d = tau * l.inverse() * u.inverse();
    FactorWord w;
    push(w, d, FactorShape::diag);
    push(w, u, FactorShape::strict_upper);
    push(w, l, FactorShape::strict_lower);
    return w;
  }

  // (1+p^(j-1)a, p^(j-1)b / pc, 1+p^(j-1)d) = (1 0 / pc 1) * D * (1 p^(j-1)b / 0 1)
  FactorWord reduces_to_lower(const Mat2& tau, const Level& lv) const {
    const auto& m = tau.modulus();
    const Mat2& rho = lv.rho;
    const std::uint32_t v = nu(m);
    const Mat2 kappa = rho * tau * rho.inverse() * tau.pow(m.neg(v));
    const EigenSplit ks = eigen_split(kappa);
    const Mat2 d = (ks.diag_a * ks.diag_d).pow(m.inv(m.sub(1, v)));
    const Mat2 u = ks.upper.pow(m.inv(m.sub(mu(m), v)));
    const Mat2 l = tau * u.inverse() * d.inverse();
    FactorWord w;
    push(w, l, FactorShape::strict_lower);
    push(w, d, FactorShape::diag);
    push(w, u, FactorShape::strict_upper);
    return w;
  }

  // (1+p^(j-1)a, e / p^(j-1)c, 1+p^(j-1)d)
  //   = (1 e / 0 1) * (1+p^(j-1)(a-ec), 0 / 0, 1+p^(j-1)d) * (1 -p^(j-1)ed / 0 1) * (1 0 / p^(j-1)c 1)
  FactorWord reduces_to_upper(const Mat2& tau, const Level& lv) const {
    const auto& m = tau.modulus();
    const std::uint32_t top = m.pow_p(m.n() - 1);
    const std::uint32_t e = tau.b();
    FactorWord w;
    if (m.valuation(e) >= m.n() - 1) {
      const EigenSplit s = eigen_split(tau);
      push(w, s.diag_a * s.diag_d, FactorShape::diag);
      push(w, s.upper, FactorShape::strict_upper);
      push(w, s.lower, FactorShape::strict_lower);
      return w;
    }
    const Mat2& rho = lv.rho;
    const Mat2 ri = rho.inverse();
    const std::uint32_t v = nu(m), u = mu(m);
    const Mat2 g1 = rho * tau * ri * tau.pow(m.neg(v));
    const Mat2 g2 = rho * g1 * ri * g1.inverse();
    if (!g2.is_upper_unipotent()) fail("second commutator is not strictly upper triangular", tau);
    const std::uint32_t l = m.mul(m.sub(u, v), m.sub(u, 1));
    const std::uint32_t r = m.valuation(e);
    const std::uint32_t f = e / m.pow_p(r);
    const std::uint32_t diff = m.sub(g2.b(), m.mul(e, l));
    if (diff % top != 0) fail("second commutator has an unexpected top-right entry", tau);
    const std::uint32_t e1 = (diff / top) % m.p();
    const std::uint32_t lambda = m.add(l, m.mul(m.pow_p(m.n() - r - 1), m.mul(e1, m.inv(f))));
    const Mat2 corner = g2.pow(m.inv(lambda));
    if (corner != Mat2::upper_unipotent(e, m)) fail("corner power differs from (1 e / 0 1)", tau);

    const std::uint32_t a = m.sub(tau.a(), 1) / top, c = tau.c() / top, d = m.sub(tau.d(), 1) / top;
    const Mat2 dg = Mat2::diag(1 + std::int64_t{top} * (std::int64_t{a} - std::int64_t{e} * c), 1 + std::int64_t{top} * d, m);
    const Mat2 up = Mat2::upper_unipotent(-std::int64_t{top} * e * d, m);
    const Mat2 lo = Mat2::lower_unipotent(std::int64_t{top} * c, m);
    const EigenSplit rs = eigen_split(corner.inverse() * tau);
    if (rs.diag_a * rs.diag_d != dg || rs.upper != up || rs.lower != lo)
      fail("closed-form factors disagree with the eigen-split of the remainder", tau);
    push(w, corner, FactorShape::strict_upper);
    push(w, dg, FactorShape::diag);
    push(w, up, FactorShape::strict_upper);
    push(w, lo, FactorShape::strict_lower);
    return w;
  }

  RhoLift lift_;
  std::vector<Level> levels_;
};

inline FactorWord decompose_in_Hn(const Mat2& tau, const Group& hn, const RhoLift& lift) {
  return HnDecomposer(hn, lift).decompose(tau);
}

/// True when H_n is generated by its diagonal, strictly upper and strictly
/// lower parts.
inline bool generated_by_triangular_parts(const Group& hn) {
  const TriangularSlices s = triangular_slices(hn);
  std::vector<Mat2> gens;
  for (const Group* part : {&s.diag, &s.strict_upper, &s.strict_lower})
    for (const auto& x : part->generators()) gens.push_back(x);
  return close(gens, hn.modulus()).order() == hn.order();
}

}  // namespace h1loc
