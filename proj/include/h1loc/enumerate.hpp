#pragma once

// Subgroup streams for scans: every subgroup of a small GL_2(Z/p^nZ), or a
// seeded sample of generated subgroups of a larger one.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "h1loc/group.hpp"

namespace h1loc {

/// Largest |GL_2(Z/p^nZ)| accepted by exhaustive enumeration (covers p^n up to 9).
inline constexpr std::uint64_t kExhaustiveAmbientBound = 4000;

inline std::uint64_t gl2_order(const PrimePowerModulus& m) {
  const std::uint64_t p = m.p(), q = m.q();
  const std::uint64_t lift = (q / p) * (q / p) * (q / p) * (q / p);
  return (p * p - 1) * (p * p - p) * lift;
}

namespace detail {

/// GL_2(Z/p^nZ) as an indexed table with a full multiplication table.
class AmbientTable {
 public:
  explicit AmbientTable(const PrimePowerModulus& m) : mod_(m) {
    const std::uint32_t q = m.q();
    for (std::uint32_t a = 0; a < q; ++a)
      for (std::uint32_t b = 0; b < q; ++b)
        for (std::uint32_t c = 0; c < q; ++c)
          for (std::uint32_t d = 0; d < q; ++d) {
            Mat2 x = Mat2::raw(a, b, c, d, m);
            if (!x.invertible()) continue;
            index_.emplace(x.key(), static_cast<std::uint32_t>(elems_.size()));
            elems_.push_back(x);
          }
    const std::size_t n = elems_.size();
    mul_.resize(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        mul_[i * n + j] = index_.at(elems_[i].mul_unchecked(elems_[j]).key());
    inv_.resize(n);
    for (std::size_t i = 0; i < n; ++i) inv_[i] = index_.at(elems_[i].inverse().key());
    identity_ = index_.at(Mat2::identity(m).key());
  }

  std::size_t size() const noexcept { return elems_.size(); }
  const Mat2& operator[](std::size_t i) const noexcept { return elems_[i]; }
  std::uint32_t mul(std::uint32_t i, std::uint32_t j) const noexcept { return mul_[i * elems_.size() + j]; }
  std::uint32_t inv(std::uint32_t i) const noexcept { return inv_[i]; }
  std::uint32_t identity() const noexcept { return identity_; }

 private:
  PrimePowerModulus mod_;
  std::vector<Mat2> elems_;
  std::unordered_map<std::uint64_t, std::uint32_t> index_;
  std::vector<std::uint32_t> mul_;
  std::vector<std::uint32_t> inv_;
  std::uint32_t identity_ = 0;
};

using Bitset = std::vector<std::uint64_t>;

struct BitsetHash {
  std::size_t operator()(const Bitset& b) const noexcept {
    std::uint64_t h = b.size();
    for (auto w : b) h = mix64(h ^ w);
    return static_cast<std::size_t>(h);
  }
};

struct TableSubgroup {
  Bitset members;
  std::vector<std::uint32_t> elements;
  std::vector<std::uint32_t> gens;
};

inline bool test_bit(const Bitset& b, std::uint32_t i) { return (b[i >> 6] >> (i & 63)) & 1U; }
inline void set_bit(Bitset& b, std::uint32_t i) { b[i >> 6] |= std::uint64_t{1} << (i & 63); }

/// <h, x>, by breadth-first closure of h's elements under left multiplication
/// by the generators. Stops early (returning a partial set) past `limit` elements.
inline TableSubgroup extend(const AmbientTable& t, const TableSubgroup& h, std::uint32_t x, std::size_t limit) {
  TableSubgroup k{h.members, h.elements, h.gens};
  k.gens.push_back(x);
  for (std::size_t head = 0; head < k.elements.size(); ++head)
    for (auto g : k.gens) {
      const std::uint32_t y = t.mul(g, k.elements[head]);
      if (test_bit(k.members, y)) continue;
      set_bit(k.members, y);
      k.elements.push_back(y);
      if (limit && k.elements.size() > limit) return k;
    }
  return k;
}

}  // namespace detail

/// Every subgroup of GL_2(Z/p^nZ), each with a generating set found along the
/// way. Subgroups are grown one generator at a time and deduplicated by their
/// exact element sets. With max_order, larger subgroups are neither reported
/// nor extended (their subgroups are still reached through smaller ones).
inline std::vector<Group> exhaustive_subgroups(const PrimePowerModulus& m, std::size_t max_order = 0) {
  if (gl2_order(m) > kExhaustiveAmbientBound)
    throw PreconditionFailed("exhaustive scan: |GL_2(Z/" + std::to_string(m.q()) + ")| = " +
                             std::to_string(gl2_order(m)) + " exceeds the bound " +
                             std::to_string(kExhaustiveAmbientBound));
  const detail::AmbientTable t(m);
  const std::size_t words = (t.size() + 63) / 64;
  std::vector<detail::TableSubgroup> found;
  std::unordered_set<detail::Bitset, detail::BitsetHash> seen;
  {
    detail::TableSubgroup triv{detail::Bitset(words, 0), {t.identity()}, {}};
    detail::set_bit(triv.members, t.identity());
    seen.insert(triv.members);
    found.push_back(std::move(triv));
  }
  for (std::size_t head = 0; head < found.size(); ++head) {
    // <H, x> only depends on the cosets xH and Hx, so each coset is tried once
    detail::Bitset done = found[head].members;
    for (std::uint32_t x = 0; x < t.size(); ++x) {
      if (detail::test_bit(done, x)) continue;
      for (auto h : found[head].elements) {
        detail::set_bit(done, t.mul(x, h));
        detail::set_bit(done, t.mul(h, x));
      }
      detail::TableSubgroup k = detail::extend(t, found[head], x, max_order);
      if (max_order && k.elements.size() > max_order) continue;
      if (!seen.insert(k.members).second) continue;
      found.push_back(std::move(k));
    }
  }
  std::vector<Group> out;
  out.reserve(found.size());
  for (const auto& s : found) {
    std::vector<Mat2> gens;
    for (auto i : s.gens) gens.push_back(t[i]);
    out.push_back(close(gens, m, s.elements.size() + 1));
  }
  return out;
}

enum class SampleFamily { uniform, borel, normal_form, cyclic_diagonal };

inline const char* to_string(SampleFamily f) {
  switch (f) {
    case SampleFamily::uniform: return "uniform";
    case SampleFamily::borel: return "borel";
    case SampleFamily::normal_form: return "normal-form";
    case SampleFamily::cyclic_diagonal: return "cyclic-diagonal";
  }
  return "?";
}

struct SampleOptions {
  std::size_t count = 0;           // distinct in-budget groups wanted
  std::uint64_t seed = 0;
  std::size_t budget = 2000;       // largest accepted group order
  std::size_t max_draws = 0;       // 0: 200 * count + 1000
  bool require_full_det = false;
  std::vector<SampleFamily> families{SampleFamily::uniform, SampleFamily::borel, SampleFamily::normal_form,
                                     SampleFamily::cyclic_diagonal};
};

struct SampleResult {
  std::vector<Group> groups;  // in draw order
  std::size_t draws = 0;
  std::size_t over_budget = 0;
};

namespace detail {

class Sampler {
 public:
  Sampler(const PrimePowerModulus& m, std::uint64_t seed) : mod_(m), eng_(seed) {}

  std::uint32_t below(std::uint32_t n) { return static_cast<std::uint32_t>(eng_() % n); }
  std::uint32_t residue() { return below(mod_.q()); }
  std::uint32_t unit() {
    for (;;) {
      const std::uint32_t v = residue();
      if (mod_.is_unit(v)) return v;
    }
  }
  Mat2 invertible() {
    for (;;) {
      Mat2 x = Mat2::raw(residue(), residue(), residue(), residue(), mod_);
      if (x.invertible()) return x;
    }
  }
  /// a + p * (random), with each entry independently left untouched half the time.
  Mat2 perturb(std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) {
    const std::uint32_t p = mod_.p(), span = mod_.q() / p;
    auto e = [&](std::uint32_t v) {
      return (eng_() & 1) ? v : mod_.add(v, mod_.mul(p, below(span)));
    };
    return Mat2::raw(e(a), e(b), e(c), e(d), mod_);
  }
  std::uint32_t teichmuller(std::uint32_t a) { return mod_.pow(a, mod_.q() / mod_.p()); }

  std::vector<Mat2> draw(SampleFamily f) {
    const std::uint32_t p = mod_.p();
    std::vector<Mat2> gens;
    const std::uint32_t k = 2 + below(2);
    switch (f) {
      case SampleFamily::uniform:
        for (std::uint32_t i = 0; i < k; ++i) gens.push_back(invertible());
        break;
      case SampleFamily::borel:
        for (std::uint32_t i = 0; i < k; ++i) gens.push_back(Mat2::raw(unit(), residue(), 0, unit(), mod_));
        if (mod_.n() > 1 && (eng_() & 1)) gens.push_back(perturb(1, 0, 0, 1));
        break;
      case SampleFamily::normal_form:
      case SampleFamily::cyclic_diagonal: {
        // diagonal Teichmuller element, then kernel elements or unipotent-mod-p ones
        std::uint32_t l1 = 1 + below(p - 1), l2 = 1 + below(p - 1);
        if (p > 2)
          while (l1 == l2 && l1 == 1) l2 = 1 + below(p - 1);
        gens.push_back(Mat2::diag(teichmuller(l1), teichmuller(l2), mod_));
        const std::uint32_t extra = 1 + below(2);
        for (std::uint32_t i = 0; i < extra; ++i) {
          const bool unipotent = f == SampleFamily::normal_form && (eng_() % 3 != 0);
          gens.push_back(unipotent ? perturb(1, 1 + below(p - 1), 0, 1) : perturb(1, 0, 0, 1));
        }
        const Mat2 b = invertible();
        const Mat2 bi = b.inverse();
        for (auto& x : gens) x = b * x * bi;
        break;
      }
    }
    return gens;
  }

 private:
  PrimePowerModulus mod_;
  std::mt19937_64 eng_;
};

}  // namespace detail

/// Seeded sample of distinct subgroups of order at most opt.budget. Families
/// are drawn round-robin; the stream is a pure function of (modulus, options).
inline SampleResult sample_subgroups(const PrimePowerModulus& m, const SampleOptions& opt) {
  SampleResult r;
  if (opt.families.empty()) throw PreconditionFailed("sample: no families selected");
  detail::Sampler s(m, opt.seed);
  const std::size_t max_draws = opt.max_draws ? opt.max_draws : 200 * opt.count + 1000;
  std::unordered_set<std::uint64_t> seen;
  while (r.groups.size() < opt.count && r.draws < max_draws) {
    const SampleFamily f = opt.families[r.draws % opt.families.size()];
    ++r.draws;
    std::vector<Mat2> gens = s.draw(f);
    Group g;
    try {
      g = close(gens, m, opt.budget + 1);
    } catch (const CapExceeded&) {
      ++r.over_budget;
      continue;
    }
    if (g.order() > opt.budget) {
      ++r.over_budget;
      continue;
    }
    if (opt.require_full_det && !has_full_determinant(g)) continue;
    if (!seen.insert(g.hash()).second) continue;
    r.groups.push_back(std::move(g));
  }
  return r;
}

}  // namespace h1loc
