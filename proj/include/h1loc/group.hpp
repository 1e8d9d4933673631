#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "h1loc/mat2.hpp"

namespace h1loc {

inline constexpr std::size_t kDefaultClosureCap = 50000;

inline std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// A finite subgroup of GL_2(Z/p^nZ), materialized as its full element list.
///
/// Elements are stored in breadth-first discovery order starting from the
/// identity. Every element i > 0 was discovered as generators()[tree_gen(i)] *
/// elements()[tree_parent(i)], which gives a spanning tree used to propagate
/// cocycle values from the generators.
class Group {
 public:
  const PrimePowerModulus& modulus() const noexcept { return mod_; }
  const std::vector<Mat2>& generators() const noexcept { return gens_; }
  const std::vector<Mat2>& elements() const noexcept { return elems_; }
  std::size_t order() const noexcept { return elems_.size(); }
  const Mat2& operator[](std::size_t i) const noexcept { return elems_[i]; }

  std::optional<std::size_t> index_of(const Mat2& x) const {
    if (x.modulus() != mod_) return std::nullopt;
    auto it = index_.find(x.key());
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<std::size_t> index_of_key(std::uint64_t key) const {
    auto it = index_.find(key);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  bool contains(const Mat2& x) const { return index_of(x).has_value(); }

  std::size_t tree_parent(std::size_t i) const noexcept { return parent_[i]; }
  std::size_t tree_gen(std::size_t i) const noexcept { return parent_gen_[i]; }

  /// Hash of the element set; independent of generators and element order.
  std::uint64_t hash() const noexcept { return hash_; }

  std::vector<std::uint64_t> sorted_keys() const {
    std::vector<std::uint64_t> k;
    k.reserve(elems_.size());
    for (const auto& e : elems_) k.push_back(e.key());
    std::sort(k.begin(), k.end());
    return k;
  }

  bool same_elements(const Group& other) const {
    if (mod_ != other.mod_ || order() != other.order() || hash_ != other.hash_) return false;
    return std::all_of(elems_.begin(), elems_.end(), [&](const Mat2& x) { return other.contains(x); });
  }

  bool is_subgroup_of(const Group& other) const {
    return mod_ == other.mod_ &&
           std::all_of(elems_.begin(), elems_.end(), [&](const Mat2& x) { return other.contains(x); });
  }

  bool is_abelian() const {
    for (const auto& x : gens_)
      for (const auto& y : gens_)
        if (x * y != y * x) return false;
    return true;
  }

  bool is_cyclic() const {
    return std::any_of(elems_.begin(), elems_.end(), [&](const Mat2& x) { return x.order() == order(); });
  }

  friend Group close(const std::vector<Mat2>& generators, PrimePowerModulus mod, std::size_t cap);

 private:
  PrimePowerModulus mod_;
  std::vector<Mat2> gens_;
  std::vector<Mat2> elems_;
  std::unordered_map<std::uint64_t, std::uint32_t> index_;
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> parent_gen_;
  std::uint64_t hash_ = 0;
};

inline std::uint64_t hash_key_set(std::vector<std::uint64_t> keys) {
  std::sort(keys.begin(), keys.end());
  std::uint64_t h = mix64(keys.size());
  for (auto k : keys) h = mix64(h ^ k);
  return h;
}

/// Subgroup generated by `generators`, by breadth-first left multiplication.
inline Group close(const std::vector<Mat2>& generators, PrimePowerModulus mod,
                   std::size_t cap = kDefaultClosureCap) {
  for (const auto& g : generators) {
    require_same_modulus(g.modulus(), mod, "close");
    if (!g.invertible()) throw NonUnit("close: generator is not invertible");
  }
  Group G;
  G.mod_ = mod;
  G.gens_ = generators;
  const Mat2 id = Mat2::identity(mod);
  G.elems_.push_back(id);
  G.index_.emplace(id.key(), 0);
  G.parent_.push_back(0);
  G.parent_gen_.push_back(0);
  for (std::size_t head = 0; head < G.elems_.size(); ++head) {
    for (std::size_t gi = 0; gi < G.gens_.size(); ++gi) {
      Mat2 y = G.gens_[gi].mul_unchecked(G.elems_[head]);
      auto [it, inserted] = G.index_.emplace(y.key(), static_cast<std::uint32_t>(G.elems_.size()));
      if (!inserted) continue;
      if (G.elems_.size() >= cap)
        throw CapExceeded("closure exceeds cap of " + std::to_string(cap) +
                          " elements; too large for exact cohomology, use sampling mode");
      G.elems_.push_back(y);
      G.parent_.push_back(static_cast<std::uint32_t>(head));
      G.parent_gen_.push_back(static_cast<std::uint32_t>(gi));
    }
  }
  std::vector<std::uint64_t> keys;
  keys.reserve(G.elems_.size());
  for (const auto& e : G.elems_) keys.push_back(e.key());
  G.hash_ = hash_key_set(std::move(keys));
  return G;
}

inline Group trivial_group(PrimePowerModulus mod) { return close({}, mod); }

/// Smallest-effort generated subgroup containing `elems`: generators are picked
/// greedily in list order. Throws PreconditionFailed if `elems` is not closed.
inline Group subgroup_from_elements(const std::vector<Mat2>& elems, PrimePowerModulus mod,
                                    std::size_t cap = kDefaultClosureCap) {
  std::vector<Mat2> gens;
  Group K = trivial_group(mod);
  for (const auto& x : elems) {
    if (K.contains(x)) continue;
    gens.push_back(x);
    K = close(gens, mod, cap);
  }
  std::unordered_set<std::uint64_t> wanted;
  for (const auto& x : elems) wanted.insert(x.key());
  if (K.order() != wanted.size() ||
      !std::all_of(K.elements().begin(), K.elements().end(),
                   [&](const Mat2& x) { return wanted.count(x.key()) > 0; }))
    throw PreconditionFailed("subgroup_from_elements: element set is not closed under products");
  return K;
}

/// Entrywise reduction modulo p^j (1 <= j <= n).
inline Group reduce_mod(const Group& g, std::uint32_t j) {
  const auto& mod = g.modulus();
  if (j < 1 || j > mod.n()) throw PreconditionFailed("reduce_mod: level out of range");
  if (j == mod.n()) return g;
  std::vector<Mat2> gens;
  for (const auto& x : g.generators()) gens.push_back(x.reduce(j));
  return close(gens, mod.truncated(j));
}

/// g' = B^-1 g B, i.e. g written in the basis given by the columns of B.
inline Group conjugate_group(const Group& g, const Mat2& basis) {
  const Mat2 inv = basis.inverse();
  std::vector<Mat2> gens;
  for (const auto& x : g.generators()) gens.push_back(inv * x * basis);
  return close(gens, g.modulus());
}

/// Elements of p-power order. This is the unique Sylow p-subgroup when it is
/// normal; when the p-elements do not form a subgroup, PreconditionFailed.
inline Group sylow_p(const Group& g) {
  std::vector<Mat2> pelems;
  for (const auto& x : g.elements())
    if (x.has_p_power_order()) pelems.push_back(x);
  try {
    return subgroup_from_elements(pelems, g.modulus());
  } catch (const PreconditionFailed&) {
    throw PreconditionFailed("sylow_p: no normal Sylow p-subgroup (p-elements not closed)");
  }
}

struct TriangularSlices {
  Group diag;
  Group strict_upper;
  Group strict_lower;
  Group upper;
  Group lower;
};

inline Group filter_subgroup(const Group& g, bool (Mat2::*pred)() const noexcept) {
  std::vector<Mat2> keep;
  for (const auto& x : g.elements())
    if ((x.*pred)()) keep.push_back(x);
  return subgroup_from_elements(keep, g.modulus());
}

inline TriangularSlices triangular_slices(const Group& g) {
  return {filter_subgroup(g, &Mat2::is_diagonal), filter_subgroup(g, &Mat2::is_upper_unipotent),
          filter_subgroup(g, &Mat2::is_lower_unipotent), filter_subgroup(g, &Mat2::is_upper),
          filter_subgroup(g, &Mat2::is_lower)};
}

/// Every cyclic subgroup <x>, deduplicated by element set, in order of first
/// appearance of a generator.
inline std::vector<Group> cyclic_subgroups(const Group& g) {
  std::vector<Group> out;
  std::map<std::vector<std::uint64_t>, std::size_t> seen;
  std::unordered_set<std::uint64_t> covered;  // x already known to generate a listed subgroup
  for (const auto& x : g.elements()) {
    if (covered.count(x.key())) continue;
    Group c = close({x}, g.modulus());
    auto keys = c.sorted_keys();
    if (seen.emplace(keys, out.size()).second) {
      // every generator x^k with gcd(k, |c|) = 1 gives the same subgroup
      const std::size_t m = c.order();
      Mat2 y = x;
      for (std::size_t k = 1; k <= m; ++k, y = y * x)
        if (std::gcd(k, m) == 1) covered.insert(y.key());
      out.push_back(std::move(c));
    }
  }
  return out;
}

/// Normal closure of `seeds` inside g.
inline Group normal_closure(const Group& g, const std::vector<Mat2>& seeds) {
  std::vector<Mat2> gens;
  Group K = trivial_group(g.modulus());
  auto add = [&](const Mat2& x) {
    if (K.contains(x)) return false;
    gens.push_back(x);
    K = close(gens, g.modulus());
    return true;
  };
  for (const auto& s : seeds) add(s);
  bool grew = true;
  while (grew) {
    grew = false;
    for (std::size_t i = 0; i < gens.size(); ++i)
      for (const auto& h : g.generators()) {
        Mat2 c = h * gens[i] * h.inverse();
        if (add(c)) grew = true;
      }
  }
  return K;
}

/// Commutator subgroup [h, h], as the normal closure of the generator commutators.
inline Group derived_subgroup(const Group& h) {
  std::vector<Mat2> seeds;
  const auto& gens = h.generators();
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t j = i + 1; j < gens.size(); ++j) seeds.push_back(commutator(gens[i], gens[j]));
  return normal_closure(h, seeds);
}

/// For a group of upper unipotent matrices {(1 x / 0 1)}, the least j with the
/// group equal to <(1 p^j / 0 1)>; nullopt when the group is not of that shape.
/// The lower-unipotent variant reads the (2,1) entry.
inline std::optional<std::uint32_t> unipotent_cyclic_level(const Group& u, bool lower = false) {
  const auto& mod = u.modulus();
  std::uint32_t j = mod.n();
  for (const auto& x : u.elements()) {
    if (lower ? !x.is_lower_unipotent() : !x.is_upper_unipotent()) return std::nullopt;
    j = std::min(j, mod.valuation(lower ? x.c() : x.b()));
  }
  // <(1 p^j / 0 1)> has exactly p^(n-j) elements, all of which must be present.
  if (u.order() != mod.pow_p(mod.n() - j)) return std::nullopt;
  return j;
}

inline bool has_full_determinant(const Group& g) {
  std::unordered_set<std::uint32_t> dets;
  for (const auto& x : g.elements()) dets.insert(x.det());
  const auto& mod = g.modulus();
  return dets.size() == mod.q() - mod.q() / mod.p();
}

/// Every central element of g.
inline std::vector<Mat2> center(const Group& g) {
  std::vector<Mat2> z;
  for (const auto& x : g.elements()) {
    bool central = std::all_of(g.generators().begin(), g.generators().end(),
                               [&](const Mat2& y) { return x * y == y * x; });
    if (central) z.push_back(x);
  }
  return z;
}

}  // namespace h1loc
