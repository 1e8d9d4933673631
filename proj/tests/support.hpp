#pragma once

// Hand-rolled generators and brute-force oracles shared by the test binaries.

#include <cstdint>
#include <random>
#include <span>
#include <unordered_set>
#include <vector>

#include "h1loc/group.hpp"
#include "h1loc/linalg.hpp"

namespace testsupport {

using namespace h1loc;

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  std::uint64_t below(std::uint64_t n) { return eng() % n; }
  std::uint32_t residue(const PrimePowerModulus& m) { return static_cast<std::uint32_t>(below(m.q())); }
  std::uint32_t unit(const PrimePowerModulus& m) {
    for (;;) {
      std::uint32_t v = residue(m);
      if (m.is_unit(v)) return v;
    }
  }
  Mat2 matrix(const PrimePowerModulus& m) {
    return Mat2::raw(residue(m), residue(m), residue(m), residue(m), m);
  }
  Mat2 invertible(const PrimePowerModulus& m) {
    for (;;) {
      Mat2 x = matrix(m);
      if (x.invertible()) return x;
    }
  }
  Mat2 upper(const PrimePowerModulus& m) { return Mat2::raw(unit(m), residue(m), 0, unit(m), m); }
  ModMatrix mod_matrix(std::size_t r, std::size_t c, const PrimePowerModulus& m) {
    ModMatrix out(r, c, m);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) out.set(i, j, residue(m));
    return out;
  }
  /// Random matrix whose entries have random valuations, so spans are not free.
  ModMatrix graded_matrix(std::size_t r, std::size_t c, const PrimePowerModulus& m) {
    ModMatrix out(r, c, m);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j)
        out.set(i, j, m.mul(residue(m), m.pow_p(static_cast<std::uint32_t>(below(m.n() + 1))) % m.q()));
    return out;
  }
};

inline std::uint64_t pack(std::span<const std::uint32_t> v, std::uint32_t q) {
  std::uint64_t k = 0;
  for (auto x : v) k = k * q + x;
  return k;
}

inline std::vector<RawVector> rows_of(const ModMatrix& m) { return m.row_list(); }

inline RawVector unpack(std::uint64_t k, std::size_t dim, std::uint32_t q) {
  RawVector v(dim);
  for (std::size_t j = dim; j-- > 0;) {
    v[j] = static_cast<std::uint32_t>(k % q);
    k /= q;
  }
  return v;
}

/// Every vector in the row span, by repeated addition of multiples of each row.
inline std::unordered_set<std::uint64_t> span_set(const std::vector<RawVector>& rows, std::size_t dim,
                                                  const PrimePowerModulus& m) {
  std::unordered_set<std::uint64_t> cur{0};
  for (const auto& r : rows) {
    std::unordered_set<std::uint64_t> next;
    for (auto k : cur) {
      const RawVector s = unpack(k, dim, m.q());
      for (std::uint32_t t = 0; t < m.q(); ++t) {
        RawVector v(dim);
        for (std::size_t j = 0; j < dim; ++j) v[j] = m.add(s[j], m.mul(t, r[j]));
        next.insert(pack(v, m.q()));
      }
    }
    cur = std::move(next);
  }
  return cur;
}

/// Invariant factors of super/sub from torsion counts of the quotient.
inline QuotientInvariants brute_quotient(const std::unordered_set<std::uint64_t>& sub,
                                         const std::unordered_set<std::uint64_t>& super, std::size_t dim,
                                         const PrimePowerModulus& m) {
  std::vector<std::uint32_t> tl(m.n() + 1, 0);
  for (std::uint32_t i = 1; i <= m.n(); ++i) {
    std::uint64_t cnt = 0;
    for (auto k : super) {
      RawVector v = unpack(k, dim, m.q());
      for (auto& x : v) x = m.mul(x, m.pow_p(i) % m.q());
      if (sub.count(pack(v, m.q()))) ++cnt;
    }
    std::uint64_t t = cnt / sub.size();
    std::uint32_t lg = 0;
    while (t > 1) {
      t /= m.p();
      ++lg;
    }
    tl[i] = lg;
  }
  QuotientInvariants q{m.p(), {}};
  for (std::uint32_t e = m.n(); e >= 1; --e) {
    std::int64_t ge = std::int64_t{tl[e]} - tl[e - 1];
    std::int64_t gnext = e < m.n() ? std::int64_t{tl[e + 1]} - tl[e] : 0;
    for (std::int64_t k = 0; k < ge - gnext; ++k) q.exponents.push_back(e);
  }
  return q;
}

/// Every subgroup of GL_2(Z/p^nZ) of order at most max_order, by brute-force
/// extension of subgroups one element at a time (independent of the scan code).
inline std::vector<Group> small_subgroups(const PrimePowerModulus& m, std::size_t max_order) {
  std::vector<Mat2> all;
  for (std::uint32_t a = 0; a < m.q(); ++a)
    for (std::uint32_t b = 0; b < m.q(); ++b)
      for (std::uint32_t c = 0; c < m.q(); ++c)
        for (std::uint32_t d = 0; d < m.q(); ++d) {
          Mat2 x = Mat2::raw(a, b, c, d, m);
          if (x.invertible()) all.push_back(x);
        }
  std::vector<Group> out{trivial_group(m)};
  std::unordered_set<std::uint64_t> seen{out[0].hash()};
  for (std::size_t head = 0; head < out.size(); ++head) {
    for (const auto& x : all) {
      if (out[head].contains(x)) continue;
      std::vector<Mat2> gens = out[head].generators();
      gens.push_back(x);
      Group k;
      try {
        k = close(gens, m, max_order + 1);
      } catch (const CapExceeded&) {
        continue;
      }
      if (k.order() > max_order) continue;
      if (seen.insert(k.hash()).second) out.push_back(std::move(k));
    }
  }
  return out;
}

}  // namespace testsupport
