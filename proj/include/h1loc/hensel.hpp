#pragma once

#include <span>
#include <vector>

#include "h1loc/modulus.hpp"

namespace h1loc {

/// Dense polynomial over Z/p^nZ, lowest degree first.
struct Polynomial {
  std::vector<Residue> coeffs;

  const PrimePowerModulus& modulus() const {
    if (coeffs.empty()) throw Error("polynomial: no coefficients");
    return coeffs.front().modulus();
  }

  Residue operator()(const Residue& x) const {
    Residue acc = Residue::from_raw(0, x.modulus());
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  Polynomial derivative() const {
    Polynomial d;
    for (std::size_t i = 1; i < coeffs.size(); ++i)
      d.coeffs.push_back(coeffs[i] * Residue(static_cast<std::int64_t>(i), coeffs[i].modulus()));
    if (d.coeffs.empty()) d.coeffs.push_back(Residue::from_raw(0, modulus()));
    return d;
  }
};

/// The unique root of P modulo p^n congruent to `root_mod_p` modulo p.
/// `root_mod_p` may be given over any power of the same prime; only its class
/// mod p is used. Throws NonUnit when the root is not simple mod p and
/// PreconditionFailed when it is not a root mod p at all.
inline Residue hensel_lift_roots(const Polynomial& poly, const Residue& root_mod_p) {
  const PrimePowerModulus& mod = poly.modulus();
  for (const auto& c : poly.coeffs) require_same_modulus(c.modulus(), mod, "hensel_lift_roots");
  if (root_mod_p.modulus().p() != mod.p()) throw ModulusMismatch("hensel_lift_roots: prime mismatch");

  Residue x(root_mod_p.value() % mod.p(), mod);
  if (poly(x).value() % mod.p() != 0)
    throw PreconditionFailed("hensel_lift_roots: not a root modulo p");
  const Polynomial dp = poly.derivative();
  if (!dp(x).is_unit()) throw NonUnit("hensel_lift_roots: root is not simple modulo p");

  // Newton steps; each one gains at least one p-adic digit.
  for (std::uint32_t k = 0; k < mod.n() && !poly(x).is_zero(); ++k)
    x = x - poly(x) * dp(x).inverse();
  if (!poly(x).is_zero()) throw Error("hensel_lift_roots: iteration did not converge");
  return x;
}

}  // namespace h1loc
