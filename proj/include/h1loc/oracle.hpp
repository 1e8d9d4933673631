#pragma once

// Brute-force cohomology by enumerating maps, independent of the Howell
// machinery. Feasible only for tiny groups and moduli.

#include <algorithm>
#include <unordered_set>
#include <vector>

#include "h1loc/group.hpp"
#include "h1loc/linalg.hpp"

namespace h1loc::oracle {

struct Result {
  std::uint64_t z1_order = 0;
  std::uint64_t b1_order = 0;
  std::uint64_t z1_loc_order = 0;
  QuotientInvariants h1;
  QuotientInvariants h1_loc;
};

namespace detail {

struct VecHash {
  std::size_t operator()(const std::vector<std::uint32_t>& v) const noexcept {
    std::uint64_t h = v.size();
    for (auto x : v) h = mix64(h ^ x);
    return static_cast<std::size_t>(h);
  }
};
using VecSet = std::unordered_set<std::vector<std::uint32_t>, VecHash>;

inline std::uint32_t log_p(std::uint64_t v, std::uint32_t p) {
  std::uint32_t k = 0;
  while (v > 1) {
    v /= p;
    ++k;
  }
  return k;
}

/// Invariants of Z/B from counts of p^i-torsion: |(Z/B)[p^i]| = #{z : p^i z in B} / |B|.
inline QuotientInvariants invariants(const std::vector<std::vector<std::uint32_t>>& z, const VecSet& b,
                                     const PrimePowerModulus& mod) {
  std::vector<std::uint32_t> torsion_log(mod.n() + 1, 0);
  for (std::uint32_t i = 1; i <= mod.n(); ++i) {
    const std::uint32_t s = mod.pow_p(i);
    std::uint64_t count = 0;
    for (const auto& v : z) {
      std::vector<std::uint32_t> w(v.size());
      for (std::size_t k = 0; k < v.size(); ++k) w[k] = mod.mul(s, v[k]);
      if (b.count(w)) ++count;
    }
    torsion_log[i] = log_p(count / b.size(), mod.p());
  }
  // factors with exponent >= i number torsion_log[i] - torsion_log[i-1]
  QuotientInvariants q;
  q.p = mod.p();
  for (std::uint32_t e = 1; e <= mod.n(); ++e) {
    std::int64_t at_least_e = std::int64_t{torsion_log[e]} - torsion_log[e - 1];
    std::int64_t at_least_next = e < mod.n() ? std::int64_t{torsion_log[e + 1]} - torsion_log[e] : 0;
    for (std::int64_t k = 0; k < at_least_e - at_least_next; ++k) q.exponents.push_back(e);
  }
  std::sort(q.exponents.rbegin(), q.exponents.rend());
  return q;
}

}  // namespace detail

/// Generators with redundant ones removed, greedily in order.
inline std::vector<Mat2> reduced_generators(const Group& g) {
  std::vector<Mat2> kept;
  Group k = trivial_group(g.modulus());
  for (const auto& x : g.generators()) {
    if (k.contains(x)) continue;
    kept.push_back(x);
    k = close(kept, g.modulus());
  }
  return kept;
}

/// Enumerates every assignment of values to a reduced generating set,
/// propagates it over the group and keeps the maps satisfying the cocycle
/// identity for all pairs.
inline Result brute_force(const Group& input) {
  const auto& mod = input.modulus();
  const Group g = close(reduced_generators(input), mod);
  const std::size_t k = g.generators().size(), order = g.order();
  const std::uint32_t q = mod.q();

  std::vector<std::vector<std::uint32_t>> prod(order, std::vector<std::uint32_t>(order));
  for (std::size_t i = 0; i < order; ++i)
    for (std::size_t j = 0; j < order; ++j)
      prod[i][j] = static_cast<std::uint32_t>(*g.index_of_key(g[i].mul_unchecked(g[j]).key()));

  // images of x - 1, as sets of packed vectors
  std::vector<std::unordered_set<std::uint32_t>> image(order);
  for (std::size_t i = 0; i < order; ++i)
    for (std::uint32_t w0 = 0; w0 < q; ++w0)
      for (std::uint32_t w1 = 0; w1 < q; ++w1) {
        const Vec2 y = g[i].apply({w0, w1});
        image[i].insert(mod.sub(y[0], w0) * q + mod.sub(y[1], w1));
      }

  std::vector<std::vector<std::uint32_t>> z1, z1_loc;
  std::vector<std::uint32_t> u(2 * k, 0);
  std::vector<Vec2> val(order);
  for (;;) {
    val[0] = {0, 0};
    for (std::size_t i = 1; i < order; ++i) {
      const std::size_t gi = g.tree_gen(i);
      const Vec2 hz = g.generators()[gi].apply(val[g.tree_parent(i)]);
      val[i] = {mod.add(u[2 * gi], hz[0]), mod.add(u[2 * gi + 1], hz[1])};
    }
    bool ok = true;
    for (std::size_t i = 0; i < order && ok; ++i)
      for (std::size_t j = 0; j < order; ++j) {
        const Vec2 xz = g[i].apply(val[j]);
        const Vec2& lhs = val[prod[i][j]];
        if (lhs[0] != mod.add(val[i][0], xz[0]) || lhs[1] != mod.add(val[i][1], xz[1])) {
          ok = false;
          break;
        }
      }
    if (ok) {
      std::vector<std::uint32_t> flat;
      bool local = true;
      for (std::size_t i = 0; i < order; ++i) {
        flat.push_back(val[i][0]);
        flat.push_back(val[i][1]);
        if (!image[i].count(val[i][0] * q + val[i][1])) local = false;
      }
      if (local) z1_loc.push_back(flat);
      z1.push_back(std::move(flat));
    }
    std::size_t pos = 0;
    while (pos < u.size() && ++u[pos] == q) u[pos++] = 0;
    if (pos == u.size()) break;
  }

  detail::VecSet b1;
  for (std::uint32_t w0 = 0; w0 < q; ++w0)
    for (std::uint32_t w1 = 0; w1 < q; ++w1) {
      std::vector<std::uint32_t> flat;
      for (std::size_t i = 0; i < order; ++i) {
        const Vec2 y = g[i].apply({w0, w1});
        flat.push_back(mod.sub(y[0], w0));
        flat.push_back(mod.sub(y[1], w1));
      }
      b1.insert(std::move(flat));
    }

  Result r;
  r.z1_order = z1.size();
  r.b1_order = b1.size();
  r.z1_loc_order = z1_loc.size();
  r.h1 = detail::invariants(z1, b1, mod);
  r.h1_loc = detail::invariants(z1_loc, b1, mod);
  return r;
}

}  // namespace h1loc::oracle
