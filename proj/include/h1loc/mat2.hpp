#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <vector>

#include "h1loc/modulus.hpp"

namespace h1loc {

/// Column vector in M = (Z/p^nZ)^2.
using Vec2 = std::array<std::uint32_t, 2>;

/// A 2x2 matrix (a b / c d) over Z/p^nZ.
class Mat2 {
 public:
  Mat2() = default;
  Mat2(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d, PrimePowerModulus mod)
      : mod_(mod), e_{mod.reduce(a), mod.reduce(b), mod.reduce(c), mod.reduce(d)} {}

  static Mat2 identity(PrimePowerModulus mod) { return Mat2(1, 0, 0, 1, mod); }
  static Mat2 diag(std::int64_t x, std::int64_t y, PrimePowerModulus mod) { return Mat2(x, 0, 0, y, mod); }
  static Mat2 upper_unipotent(std::int64_t x, PrimePowerModulus mod) { return Mat2(1, x, 0, 1, mod); }
  static Mat2 lower_unipotent(std::int64_t x, PrimePowerModulus mod) { return Mat2(1, 0, x, 1, mod); }

  static Mat2 from_key(std::uint64_t key, PrimePowerModulus mod) {
    Mat2 m;
    m.mod_ = mod;
    for (int i = 0; i < 4; ++i) m.e_[i] = static_cast<std::uint32_t>((key >> (16 * i)) & 0xffff);
    return m;
  }

  std::uint32_t a() const noexcept { return e_[0]; }
  std::uint32_t b() const noexcept { return e_[1]; }
  std::uint32_t c() const noexcept { return e_[2]; }
  std::uint32_t d() const noexcept { return e_[3]; }
  std::uint32_t entry(int i, int j) const noexcept { return e_[2 * i + j]; }
  const PrimePowerModulus& modulus() const noexcept { return mod_; }

  /// Packs the four entries into one 64-bit word (entries are < 2^16).
  std::uint64_t key() const noexcept {
    return std::uint64_t{e_[0]} | (std::uint64_t{e_[1]} << 16) | (std::uint64_t{e_[2]} << 32) |
           (std::uint64_t{e_[3]} << 48);
  }

  std::uint32_t det() const noexcept { return mod_.sub(mod_.mul(e_[0], e_[3]), mod_.mul(e_[1], e_[2])); }
  Residue det_residue() const { return Residue::from_raw(det(), mod_); }
  bool invertible() const noexcept { return mod_.is_unit(det()); }
  std::uint32_t trace() const noexcept { return mod_.add(e_[0], e_[3]); }

  bool is_identity() const noexcept { return e_[0] == 1 % mod_.q() && e_[1] == 0 && e_[2] == 0 && e_[3] == 1 % mod_.q(); }
  bool is_diagonal() const noexcept { return e_[1] == 0 && e_[2] == 0; }
  bool is_scalar() const noexcept { return is_diagonal() && e_[0] == e_[3]; }
  bool is_upper() const noexcept { return e_[2] == 0; }
  bool is_lower() const noexcept { return e_[1] == 0; }
  /// (1 x / 0 1)
  bool is_upper_unipotent() const noexcept { return e_[2] == 0 && e_[0] == 1 % mod_.q() && e_[3] == 1 % mod_.q(); }
  /// (1 0 / x 1)
  bool is_lower_unipotent() const noexcept { return e_[1] == 0 && e_[0] == 1 % mod_.q() && e_[3] == 1 % mod_.q(); }

  friend Mat2 operator*(const Mat2& x, const Mat2& y) {
    require_same_modulus(x.mod_, y.mod_, "Mat2 product");
    return x.mul_unchecked(y);
  }

  Mat2 mul_unchecked(const Mat2& y) const noexcept {
    const std::uint64_t q = mod_.q();
    Mat2 r;
    r.mod_ = mod_;
    r.e_[0] = static_cast<std::uint32_t>((std::uint64_t{e_[0]} * y.e_[0] + std::uint64_t{e_[1]} * y.e_[2]) % q);
    r.e_[1] = static_cast<std::uint32_t>((std::uint64_t{e_[0]} * y.e_[1] + std::uint64_t{e_[1]} * y.e_[3]) % q);
    r.e_[2] = static_cast<std::uint32_t>((std::uint64_t{e_[2]} * y.e_[0] + std::uint64_t{e_[3]} * y.e_[2]) % q);
    r.e_[3] = static_cast<std::uint32_t>((std::uint64_t{e_[2]} * y.e_[1] + std::uint64_t{e_[3]} * y.e_[3]) % q);
    return r;
  }

  friend Mat2 operator+(const Mat2& x, const Mat2& y) {
    require_same_modulus(x.mod_, y.mod_, "Mat2 sum");
    const auto& m = x.mod_;
    return raw(m.add(x.e_[0], y.e_[0]), m.add(x.e_[1], y.e_[1]), m.add(x.e_[2], y.e_[2]),
               m.add(x.e_[3], y.e_[3]), m);
  }
  friend Mat2 operator-(const Mat2& x, const Mat2& y) {
    require_same_modulus(x.mod_, y.mod_, "Mat2 difference");
    const auto& m = x.mod_;
    return raw(m.sub(x.e_[0], y.e_[0]), m.sub(x.e_[1], y.e_[1]), m.sub(x.e_[2], y.e_[2]),
               m.sub(x.e_[3], y.e_[3]), m);
  }

  Mat2 scaled(std::uint32_t s) const noexcept {
    return raw(mod_.mul(e_[0], s), mod_.mul(e_[1], s), mod_.mul(e_[2], s), mod_.mul(e_[3], s), mod_);
  }

  Mat2 inverse() const {
    const std::uint32_t di = mod_.inv(det());
    return raw(mod_.mul(e_[3], di), mod_.mul(mod_.neg(e_[1]), di), mod_.mul(mod_.neg(e_[2]), di),
               mod_.mul(e_[0], di), mod_);
  }

  /// x^e for e >= 0.
  Mat2 pow(std::uint64_t e) const noexcept {
    Mat2 r = identity(mod_), base = *this;
    while (e) {
      if (e & 1) r = r.mul_unchecked(base);
      base = base.mul_unchecked(base);
      e >>= 1;
    }
    return r;
  }

  /// x^k for a signed exponent; negative exponents require invertibility.
  Mat2 pow_signed(std::int64_t k) const { return k >= 0 ? pow(static_cast<std::uint64_t>(k)) : inverse().pow(static_cast<std::uint64_t>(-k)); }

  /// Multiple of every element order in GL_2(Z/p^nZ): p^n (p-1)(p+1).
  std::uint64_t exponent_bound() const noexcept {
    return std::uint64_t{mod_.q()} * (mod_.p() - 1) * (mod_.p() + 1);
  }

  /// Least k >= 1 with x^k = I.
  std::uint64_t order() const {
    if (!invertible()) throw NonUnit("order of a singular matrix");
    const std::uint32_t p = mod_.p();
    std::uint64_t ord = exponent_bound();
    std::vector<std::uint64_t> primes;
    auto add_factors = [&primes](std::uint64_t v) {
      for (std::uint64_t d = 2; d * d <= v; ++d) {
        if (v % d) continue;
        primes.push_back(d);
        while (v % d == 0) v /= d;
      }
      if (v > 1) primes.push_back(v);
    };
    add_factors(p);
    add_factors(p - 1);
    add_factors(p + 1);
    for (auto r : primes)
      while (ord % r == 0 && pow(ord / r).is_identity()) ord /= r;
    return ord;
  }

  /// True when the order is a power of p (including order 1).
  bool has_p_power_order() const {
    std::uint64_t o = order();
    while (o % mod_.p() == 0) o /= mod_.p();
    return o == 1;
  }

  /// x^m for a class m in Z/p^nZ; only meaningful when the order divides p^n.
  Mat2 pow_class(const Residue& m) const {
    require_same_modulus(m.modulus(), mod_, "pow_class");
    if (mod_.q() % order() != 0)
      throw PreconditionFailed("pow_class: element order does not divide p^n");
    return pow(m.value());
  }
  Mat2 pow_class(std::uint32_t m) const { return pow_class(Residue::from_raw(mod_.reduce(m), mod_)); }

  /// Entrywise reduction to Z/p^jZ.
  Mat2 reduce(std::uint32_t j) const {
    PrimePowerModulus m = mod_.truncated(j);
    return Mat2(e_[0], e_[1], e_[2], e_[3], m);
  }

  Vec2 apply(const Vec2& v) const noexcept {
    const std::uint64_t q = mod_.q();
    return {static_cast<std::uint32_t>((std::uint64_t{e_[0]} * v[0] + std::uint64_t{e_[1]} * v[1]) % q),
            static_cast<std::uint32_t>((std::uint64_t{e_[2]} * v[0] + std::uint64_t{e_[3]} * v[1]) % q)};
  }

  friend bool operator==(const Mat2& x, const Mat2& y) noexcept { return x.mod_ == y.mod_ && x.e_ == y.e_; }
  friend bool operator!=(const Mat2& x, const Mat2& y) noexcept { return !(x == y); }
  friend bool operator<(const Mat2& x, const Mat2& y) noexcept { return x.key() < y.key(); }

  friend std::ostream& operator<<(std::ostream& os, const Mat2& m) {
    return os << '(' << m.e_[0] << ' ' << m.e_[1] << " / " << m.e_[2] << ' ' << m.e_[3] << ')';
  }

  static Mat2 raw(std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d, PrimePowerModulus mod) noexcept {
    Mat2 m;
    m.mod_ = mod;
    m.e_ = {a, b, c, d};
    return m;
  }

 private:
  PrimePowerModulus mod_;
  std::array<std::uint32_t, 4> e_{1, 0, 0, 1};
};

/// x y x^-1 y^-1
inline Mat2 commutator(const Mat2& x, const Mat2& y) { return x * y * x.inverse() * y.inverse(); }

inline Mat2 conjugate_by(const Mat2& x, const Mat2& basis) { return basis.inverse() * x * basis; }

}  // namespace h1loc
