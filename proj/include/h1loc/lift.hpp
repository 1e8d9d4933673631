#pragma once

// Normal form of the mod-p image and the equal-order diagonal lift of its
// semisimple part.

#include <optional>
#include <string>

#include "h1loc/group.hpp"
#include "h1loc/hensel.hpp"

namespace h1loc {

enum class G1Form { cyclic_diag, diag_plus_unipotent, other };

inline const char* to_string(G1Form f) {
  switch (f) {
    case G1Form::cyclic_diag: return "cyclic-diag";
    case G1Form::diag_plus_unipotent: return "diag-plus-unipotent";
    case G1Form::other: return "other";
  }
  return "?";
}

/// In the basis given by the columns of basis_change, g1 = <rho> or
/// <rho, (1 1 / 0 1)> with rho = diag(lambda1, lambda2).
struct G1Classification {
  G1Form form = G1Form::other;
  Mat2 rho;
  std::uint64_t order_rho = 0;
  std::uint32_t lambda1 = 0;
  std::uint32_t lambda2 = 0;
  Mat2 basis_change;

  bool in_normal_form() const noexcept { return form != G1Form::other; }
};

namespace detail {

/// Tries one conjugator; fills `out` when C^-1 g1 C has the normal form.
inline bool try_normal_form(const Group& g1, const Mat2& c, G1Classification& out) {
  const auto& mod = g1.modulus();
  const Mat2 ci = c.inverse();
  for (const auto& x : g1.generators())
    if (!(ci * x * c).is_upper()) return false;

  std::vector<Mat2> diag, unip;
  for (const auto& x : g1.elements()) {
    Mat2 h = ci * x * c;
    if (h.is_diagonal()) diag.push_back(h);
    if (h.is_upper_unipotent()) unip.push_back(h);
  }
  if (diag.size() * unip.size() != g1.order()) return false;

  const Mat2* rho = nullptr;
  for (const auto& d : diag) {
    if (d.order() != diag.size()) continue;
    if (!rho || std::pair{d.a(), d.d()} < std::pair{rho->a(), rho->d()}) rho = &d;
  }
  if (!rho) return false;  // diagonal part not cyclic
  if (!rho->is_identity() && rho->a() == rho->d()) return false;

  Mat2 basis = c;
  if (unip.size() > 1) {
    // rescale the first basis vector so that the unipotent generator becomes (1 1 / 0 1)
    std::uint32_t u = 0;
    for (const auto& x : unip)
      if (x.b() != 0) {
        u = x.b();
        break;
      }
    basis = c * Mat2::diag(u, 1, mod);
  }
  out.form = unip.size() > 1 ? G1Form::diag_plus_unipotent : G1Form::cyclic_diag;
  out.rho = *rho;
  out.order_rho = diag.size();
  out.lambda1 = rho->a();
  out.lambda2 = rho->d();
  out.basis_change = basis;
  return true;
}

}  // namespace detail

/// Searches GL_2(F_p) for a basis putting g1 in normal form. The identity is
/// tried first, then every invertible matrix in lexicographic entry order.
inline G1Classification classify_g1(const Group& g1) {
  const auto& mod = g1.modulus();
  if (mod.n() != 1) throw PreconditionFailed("classify_g1: group must live over Z/pZ");
  G1Classification out;
  out.basis_change = Mat2::identity(mod);
  out.rho = Mat2::identity(mod);
  if (detail::try_normal_form(g1, Mat2::identity(mod), out)) return out;
  const std::uint32_t p = mod.p();
  for (std::uint32_t a = 0; a < p; ++a)
    for (std::uint32_t b = 0; b < p; ++b)
      for (std::uint32_t c = 0; c < p; ++c)
        for (std::uint32_t d = 0; d < p; ++d) {
          Mat2 m(a, b, c, d, mod);
          if (!m.invertible() || m.is_identity()) continue;
          if (detail::try_normal_form(g1, m, out)) return out;
        }
  out = G1Classification{};
  out.basis_change = Mat2::identity(mod);
  out.rho = Mat2::identity(mod);
  return out;
}

struct RhoLift {
  Mat2 matrix;              // rho_n, diagonal
  std::uint32_t lambda1 = 0;  // eigenvalues of rho_n mod p^n
  std::uint32_t lambda2 = 0;
  std::uint64_t order = 0;
  Mat2 basis_change;        // columns are the eigenvectors Q1, Q2
  Group conjugated;         // basis_change^-1 g basis_change, contains rho_n
  G1Classification g1;

  const PrimePowerModulus& modulus() const noexcept { return matrix.modulus(); }
  /// lambda1 / lambda2
  std::uint32_t mu() const { return modulus().mul(lambda1, modulus().inv(lambda2)); }
  /// lambda2 / lambda1
  std::uint32_t nu() const { return modulus().mul(lambda2, modulus().inv(lambda1)); }
  /// lambda1^2 != lambda2^2 mod p, i.e. mu - nu is a unit.
  bool eigen_ratio_invertible() const {
    const auto& m = modulus();
    return m.is_unit(m.sub(mu(), nu()));
  }
};

namespace detail {

/// A primitive generator of ker(x - lambda) when x - lambda has rank one mod p,
/// normalized to the lexicographically least unit multiple.
inline Vec2 eigenvector(const Mat2& x, std::uint32_t lambda) {
  const auto& mod = x.modulus();
  const Mat2 m = x - Mat2::identity(mod).scaled(lambda);
  Vec2 v;
  if (mod.is_unit(m.a()) || mod.is_unit(m.b()))
    v = {m.b(), mod.neg(m.a())};
  else if (mod.is_unit(m.c()) || mod.is_unit(m.d()))
    v = {m.d(), mod.neg(m.c())};
  else
    throw PreconditionFailed("eigenvector: eigenspace is not a line mod p");
  Vec2 best = v;
  for (std::uint32_t u = 1; u < mod.q(); ++u) {
    if (!mod.is_unit(u)) continue;
    Vec2 w{mod.mul(u, v[0]), mod.mul(u, v[1])};
    if (w < best) best = w;
  }
  return best;
}

}  // namespace detail

/// Equal-order diagonal lift of rho, or nullopt when g1 is not in normal form
/// or rho = I.
inline std::optional<RhoLift> diagonal_rho_lift(const Group& g) {
  const auto& mod = g.modulus();
  const Group g1 = reduce_mod(g, 1);
  G1Classification cls = classify_g1(g1);
  if (!cls.in_normal_form() || cls.rho.is_identity()) return std::nullopt;

  const Mat2& c = cls.basis_change;
  const Mat2 target = c * cls.rho * c.inverse();
  const Mat2* x = nullptr;
  for (const auto& y : g.elements())
    if (y.reduce(1) == target) {
      x = &y;
      break;
    }
  if (!x) throw Error("diagonal_rho_lift: no element reduces to rho");

  Polynomial charpoly{{Residue::from_raw(x->det(), mod), Residue::from_raw(mod.neg(x->trace()), mod),
                       Residue(1, mod)}};
  const std::uint32_t l1 = hensel_lift_roots(charpoly, Residue(cls.lambda1, mod.truncated(1))).value();
  const std::uint32_t l2 = hensel_lift_roots(charpoly, Residue(cls.lambda2, mod.truncated(1))).value();
  const Vec2 v1 = detail::eigenvector(*x, l1), v2 = detail::eigenvector(*x, l2);
  const Mat2 basis = Mat2::raw(v1[0], v2[0], v1[1], v2[1], mod);

  const Mat2 diag = conjugate_by(*x, basis);
  if (!diag.is_diagonal()) throw Error("diagonal_rho_lift: eigenbasis does not diagonalize the lift");
  const Mat2 rho_n = diag.pow(mod.q() / mod.p());

  RhoLift lift;
  lift.matrix = rho_n;
  lift.lambda1 = rho_n.a();
  lift.lambda2 = rho_n.d();
  lift.order = rho_n.order();
  lift.basis_change = basis;
  lift.conjugated = conjugate_group(g, basis);
  lift.g1 = cls;
  if (lift.order != cls.order_rho)
    throw Error("diagonal_rho_lift: lift order " + std::to_string(lift.order) + " differs from order of rho " +
                std::to_string(cls.order_rho));
  if (!lift.conjugated.contains(rho_n)) throw Error("diagonal_rho_lift: lift is not in the group");
  return lift;
}

}  // namespace h1loc
