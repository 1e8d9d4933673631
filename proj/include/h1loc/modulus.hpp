#pragma once

#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>

#include "h1loc/error.hpp"

namespace h1loc {

inline bool is_prime(std::uint64_t v) {
  if (v < 2) return false;
  for (std::uint64_t d = 2; d * d <= v; ++d)
    if (v % d == 0) return false;
  return true;
}

/// The ring Z/p^nZ. The modulus is kept below 2^16 so that a 2x2 matrix packs
/// into one 64-bit key.
class PrimePowerModulus {
 public:
  static constexpr std::uint32_t kMaxModulus = 1u << 16;

  PrimePowerModulus() = default;
  PrimePowerModulus(std::uint32_t p, std::uint32_t n) : p_(p), n_(n) {
    if (!is_prime(p)) throw Error("modulus: " + std::to_string(p) + " is not prime");
    if (n < 1) throw Error("modulus: exponent must be >= 1");
    std::uint64_t q = 1;
    for (std::uint32_t i = 0; i < n; ++i) {
      q *= p;
      if (q >= kMaxModulus) throw Error("modulus: p^n must be below 65536");
    }
    q_ = static_cast<std::uint32_t>(q);
  }

  std::uint32_t p() const noexcept { return p_; }
  std::uint32_t n() const noexcept { return n_; }
  std::uint32_t q() const noexcept { return q_; }

  /// p^k for 0 <= k <= n.
  std::uint32_t pow_p(std::uint32_t k) const noexcept {
    std::uint32_t r = 1;
    for (std::uint32_t i = 0; i < k; ++i) r *= p_;
    return r;
  }

  std::uint32_t reduce(std::int64_t v) const noexcept {
    std::int64_t r = v % static_cast<std::int64_t>(q_);
    return static_cast<std::uint32_t>(r < 0 ? r + q_ : r);
  }
  std::uint32_t add(std::uint32_t a, std::uint32_t b) const noexcept {
    std::uint32_t s = a + b;
    return s >= q_ ? s - q_ : s;
  }
  std::uint32_t sub(std::uint32_t a, std::uint32_t b) const noexcept {
    return a >= b ? a - b : a + q_ - b;
  }
  std::uint32_t neg(std::uint32_t a) const noexcept { return a == 0 ? 0 : q_ - a; }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const noexcept {
    return static_cast<std::uint32_t>(static_cast<std::uint64_t>(a) * b % q_);
  }

  bool is_unit(std::uint32_t a) const noexcept { return a % p_ != 0; }

  /// p-adic valuation of a canonical residue; the zero residue has valuation n.
  std::uint32_t valuation(std::uint32_t a) const noexcept {
    if (a == 0) return n_;
    std::uint32_t v = 0;
    while (a % p_ == 0) {
      a /= p_;
      ++v;
    }
    return v;
  }

  std::uint32_t inv(std::uint32_t a) const {
    std::int64_t t = 0, new_t = 1;
    std::int64_t r = q_, new_r = a % q_;
    while (new_r != 0) {
      std::int64_t quot = r / new_r;
      std::int64_t tmp = t - quot * new_t;
      t = new_t;
      new_t = tmp;
      tmp = r - quot * new_r;
      r = new_r;
      new_r = tmp;
    }
    if (r != 1)
      throw NonUnit("inverse of non-unit " + std::to_string(a) + " mod " + std::to_string(q_));
    return reduce(t);
  }

  std::uint32_t pow(std::uint32_t a, std::uint64_t e) const noexcept {
    std::uint32_t r = 1 % q_;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }

  /// Reduction map Z/p^nZ -> Z/p^jZ.
  PrimePowerModulus truncated(std::uint32_t j) const { return PrimePowerModulus(p_, j); }

  friend bool operator==(const PrimePowerModulus& a, const PrimePowerModulus& b) noexcept {
    return a.p_ == b.p_ && a.n_ == b.n_;
  }
  friend bool operator!=(const PrimePowerModulus& a, const PrimePowerModulus& b) noexcept {
    return !(a == b);
  }
  friend std::ostream& operator<<(std::ostream& os, const PrimePowerModulus& m) {
    return os << m.p_ << '^' << m.n_;
  }

 private:
  std::uint32_t p_ = 2;
  std::uint32_t n_ = 1;
  std::uint32_t q_ = 2;
};

inline void require_same_modulus(const PrimePowerModulus& a, const PrimePowerModulus& b,
                                 const char* where) {
  if (a != b) throw ModulusMismatch(std::string(where) + ": modulus mismatch");
}

/// An element of Z/p^nZ carrying its modulus.
class Residue {
 public:
  Residue() = default;
  Residue(std::int64_t value, PrimePowerModulus mod) : mod_(mod), value_(mod.reduce(value)) {}

  std::uint32_t value() const noexcept { return value_; }
  const PrimePowerModulus& modulus() const noexcept { return mod_; }
  bool is_unit() const noexcept { return mod_.is_unit(value_); }
  bool is_zero() const noexcept { return value_ == 0; }
  std::uint32_t valuation() const noexcept { return mod_.valuation(value_); }

  Residue inverse() const { return from_raw(mod_.inv(value_), mod_); }
  Residue pow(std::uint64_t e) const { return from_raw(mod_.pow(value_, e), mod_); }

  friend Residue operator+(const Residue& a, const Residue& b) {
    require_same_modulus(a.mod_, b.mod_, "residue add");
    return from_raw(a.mod_.add(a.value_, b.value_), a.mod_);
  }
  friend Residue operator-(const Residue& a, const Residue& b) {
    require_same_modulus(a.mod_, b.mod_, "residue sub");
    return from_raw(a.mod_.sub(a.value_, b.value_), a.mod_);
  }
  friend Residue operator*(const Residue& a, const Residue& b) {
    require_same_modulus(a.mod_, b.mod_, "residue mul");
    return from_raw(a.mod_.mul(a.value_, b.value_), a.mod_);
  }
  Residue operator-() const { return from_raw(mod_.neg(value_), mod_); }

  friend bool operator==(const Residue& a, const Residue& b) noexcept {
    return a.mod_ == b.mod_ && a.value_ == b.value_;
  }
  friend std::ostream& operator<<(std::ostream& os, const Residue& r) {
    return os << r.value_ << " (mod " << r.mod_.q() << ')';
  }

  static Residue from_raw(std::uint32_t v, PrimePowerModulus mod) {
    Residue r;
    r.mod_ = mod;
    r.value_ = v;
    return r;
  }

 private:
  PrimePowerModulus mod_;
  std::uint32_t value_ = 0;
};

}  // namespace h1loc
