#pragma once

// Linear algebra over the local ring Z/p^nZ.
//
// Row-vector convention throughout: a matrix acts on the right, x -> x*m, and
// a submodule of (Z/p^nZ)^k is the row span of a generator matrix. Submodules
// are canonicalized by the Howell normal form, whose rows are unique for a
// given span, so submodule equality reduces to matrix equality.

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "h1loc/modulus.hpp"

namespace h1loc {

using RawVector = std::vector<std::uint32_t>;

class ModMatrix {
 public:
  ModMatrix() = default;
  ModMatrix(std::size_t rows, std::size_t cols, PrimePowerModulus mod)
      : rows_(rows), cols_(cols), mod_(mod), data_(rows * cols, 0) {}

  static ModMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows,
                             PrimePowerModulus mod) {
    std::size_t cols = rows.empty() ? 0 : rows.front().size();
    ModMatrix m(rows.size(), cols, mod);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != cols) throw DimensionMismatch("from_rows: ragged rows");
      for (std::size_t j = 0; j < cols; ++j) m.data_[i * cols + j] = mod.reduce(rows[i][j]);
    }
    return m;
  }

  static ModMatrix from_raw_rows(const std::vector<RawVector>& rows, std::size_t cols,
                                 PrimePowerModulus mod) {
    ModMatrix m(rows.size(), cols, mod);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != cols) throw DimensionMismatch("from_raw_rows: ragged rows");
      std::copy(rows[i].begin(), rows[i].end(), m.data_.begin() + i * cols);
    }
    return m;
  }

  static ModMatrix identity(std::size_t n, PrimePowerModulus mod) {
    ModMatrix m(n, n, mod);
    for (std::size_t i = 0; i < n; ++i) m.data_[i * n + i] = 1 % mod.q();
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  const PrimePowerModulus& modulus() const noexcept { return mod_; }

  std::uint32_t operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[i * cols_ + j];
  }
  Residue at(std::size_t i, std::size_t j) const {
    return Residue::from_raw(data_.at(i * cols_ + j), mod_);
  }
  void set(std::size_t i, std::size_t j, std::int64_t v) { data_.at(i * cols_ + j) = mod_.reduce(v); }

  std::span<const std::uint32_t> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  RawVector row_vector(std::size_t i) const {
    auto r = row(i);
    return {r.begin(), r.end()};
  }
  std::vector<RawVector> row_list() const {
    std::vector<RawVector> out;
    out.reserve(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out.push_back(row_vector(i));
    return out;
  }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](std::uint32_t v) { return v == 0; });
  }

  ModMatrix transpose() const {
    ModMatrix t(cols_, rows_, mod_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t.data_[j * rows_ + i] = data_[i * cols_ + j];
    return t;
  }

  friend ModMatrix operator*(const ModMatrix& a, const ModMatrix& b) {
    require_same_modulus(a.mod_, b.mod_, "matrix product");
    if (a.cols_ != b.rows_) throw DimensionMismatch("matrix product: inner dimensions differ");
    ModMatrix c(a.rows_, b.cols_, a.mod_);
    const std::uint64_t q = a.mod_.q();
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < b.cols_; ++j) {
        std::uint64_t acc = 0;
        for (std::size_t k = 0; k < a.cols_; ++k) acc = (acc + std::uint64_t{a(i, k)} * b(k, j)) % q;
        c.data_[i * c.cols_ + j] = static_cast<std::uint32_t>(acc);
      }
    return c;
  }

  /// x * m for a row vector x.
  RawVector left_apply(std::span<const std::uint32_t> x) const {
    if (x.size() != rows_) throw DimensionMismatch("left_apply: length mismatch");
    RawVector out(cols_, 0);
    const std::uint64_t q = mod_.q();
    for (std::size_t i = 0; i < rows_; ++i) {
      if (x[i] == 0) continue;
      for (std::size_t j = 0; j < cols_; ++j)
        out[j] = static_cast<std::uint32_t>((out[j] + std::uint64_t{x[i]} * (*this)(i, j)) % q);
    }
    return out;
  }

  static ModMatrix vstack(const ModMatrix& top, const ModMatrix& bottom) {
    if (top.rows_ == 0) return bottom;
    if (bottom.rows_ == 0) return top;
    require_same_modulus(top.mod_, bottom.mod_, "vstack");
    if (top.cols_ != bottom.cols_) throw DimensionMismatch("vstack: column counts differ");
    ModMatrix m(top.rows_ + bottom.rows_, top.cols_, top.mod_);
    std::copy(top.data_.begin(), top.data_.end(), m.data_.begin());
    std::copy(bottom.data_.begin(), bottom.data_.end(), m.data_.begin() + top.data_.size());
    return m;
  }

  ModMatrix scaled(std::uint32_t s) const {
    ModMatrix m = *this;
    for (auto& v : m.data_) v = mod_.mul(v, s);
    return m;
  }

  friend bool operator==(const ModMatrix& a, const ModMatrix& b) noexcept {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.mod_ == b.mod_ && a.data_ == b.data_;
  }

  friend std::ostream& operator<<(std::ostream& os, const ModMatrix& m) {
    os << '[';
    for (std::size_t i = 0; i < m.rows_; ++i) {
      os << (i ? "; " : "");
      for (std::size_t j = 0; j < m.cols_; ++j) os << (j ? " " : "") << m(i, j);
    }
    return os << "] mod " << m.mod_.q();
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  PrimePowerModulus mod_;
  std::vector<std::uint32_t> data_;
};

/// Canonical generator matrix of a submodule. Row i has its first nonzero entry
/// p^{valuations[i]} in column pivots[i]; pivot columns strictly increase, the
/// entries above a pivot lie in [0, pivot), and every vector of the span whose
/// first k coordinates vanish is spanned by the rows whose pivot column is >= k.
struct HowellBasis {
  ModMatrix matrix;
  std::vector<std::size_t> pivots;
  std::vector<std::uint32_t> valuations;

  std::size_t rank() const noexcept { return pivots.size(); }
  std::size_t ambient_dim() const noexcept { return matrix.cols(); }
  const PrimePowerModulus& modulus() const noexcept { return matrix.modulus(); }
  bool is_zero() const noexcept { return pivots.empty(); }

  /// log_p of the number of elements in the span.
  std::uint64_t log_order() const noexcept {
    std::uint64_t s = 0;
    for (auto v : valuations) s += modulus().n() - v;
    return s;
  }

  friend bool operator==(const HowellBasis& a, const HowellBasis& b) noexcept {
    return a.matrix == b.matrix;
  }
};

namespace detail {

inline void row_axpy(RawVector& dst, const RawVector& src, std::uint32_t t,
                     const PrimePowerModulus& mod, std::size_t from = 0) {
  // dst -= t * src
  if (t == 0) return;
  const std::uint64_t q = mod.q();
  const std::uint64_t nt = q - t;
  for (std::size_t j = from; j < dst.size(); ++j)
    if (src[j]) dst[j] = static_cast<std::uint32_t>((dst[j] + nt * src[j]) % q);
}

inline void row_scale(RawVector& row, std::uint32_t s, const PrimePowerModulus& mod,
                      std::size_t from = 0) {
  for (std::size_t j = from; j < row.size(); ++j) row[j] = mod.mul(row[j], s);
}

inline bool row_is_zero(const RawVector& row) {
  return std::all_of(row.begin(), row.end(), [](std::uint32_t v) { return v == 0; });
}

inline HowellBasis howell_from_rows(std::vector<RawVector> work, std::size_t cols,
                                    const PrimePowerModulus& mod) {
  const std::uint32_t n = mod.n();
  std::erase_if(work, row_is_zero);
  std::vector<RawVector> result;
  std::vector<std::size_t> pivots;
  std::vector<std::uint32_t> vals;

  // Invariant: every row in `work` vanishes on the columns before `col`.
  for (std::size_t col = 0; col < cols && !work.empty(); ++col) {
    std::size_t best = work.size();
    std::uint32_t best_val = n;
    for (std::size_t r = 0; r < work.size(); ++r) {
      std::uint32_t x = work[r][col];
      if (x == 0) continue;
      std::uint32_t v = mod.valuation(x);
      if (v < best_val) {
        best_val = v;
        best = r;
        if (v == 0) break;
      }
    }
    if (best == work.size()) continue;

    RawVector piv = std::move(work[best]);
    work.erase(work.begin() + static_cast<std::ptrdiff_t>(best));
    const std::uint32_t pk = mod.pow_p(best_val);
    const std::uint32_t unit = piv[col] / pk;
    detail::row_scale(piv, mod.inv(unit % mod.q()), mod, col);
    // piv[col] == p^best_val now

    for (auto& r : work) {
      if (r[col] == 0) continue;
      detail::row_axpy(r, piv, r[col] / pk, mod, col);
    }
    if (best_val > 0) {
      RawVector extra = piv;
      detail::row_scale(extra, mod.pow_p(n - best_val), mod, col);
      work.push_back(std::move(extra));
    }
    std::erase_if(work, row_is_zero);
    result.push_back(std::move(piv));
    pivots.push_back(col);
    vals.push_back(best_val);
  }

  // Reduce the entries above each pivot into [0, p^v).
  for (std::size_t i = 0; i < result.size(); ++i) {
    const std::size_t c = pivots[i];
    const std::uint32_t pk = mod.pow_p(vals[i]);
    for (std::size_t k = 0; k < i; ++k) {
      std::uint32_t t = result[k][c] / pk;
      detail::row_axpy(result[k], result[i], t, mod, c);
    }
  }

  HowellBasis hb{ModMatrix::from_raw_rows(result, cols, mod), std::move(pivots), std::move(vals)};
  return hb;
}

}  // namespace detail

inline HowellBasis howell_form(const ModMatrix& m) {
  return detail::howell_from_rows(m.row_list(), m.cols(), m.modulus());
}

inline HowellBasis zero_submodule(std::size_t dim, PrimePowerModulus mod) {
  return howell_form(ModMatrix(0, dim, mod));
}

inline HowellBasis full_module(std::size_t dim, PrimePowerModulus mod) {
  return howell_form(ModMatrix::identity(dim, mod));
}

/// Coefficients c with c * basis == v, or nullopt if v lies outside the span.
inline std::optional<RawVector> solve_membership_raw(const HowellBasis& basis,
                                                     std::span<const std::uint32_t> v) {
  const auto& mod = basis.modulus();
  if (v.size() != basis.ambient_dim()) throw DimensionMismatch("solve_membership: length mismatch");
  RawVector rest(v.begin(), v.end());
  RawVector coeff(basis.rank(), 0);
  std::size_t next = 0;
  for (std::size_t col = 0; col < rest.size(); ++col) {
    if (next < basis.rank() && basis.pivots[next] == col) {
      if (rest[col] != 0) {
        const std::uint32_t pk = mod.pow_p(basis.valuations[next]);
        if (rest[col] % pk != 0) return std::nullopt;
        const std::uint32_t t = rest[col] / pk;
        auto r = basis.matrix.row(next);
        detail::row_axpy(rest, RawVector(r.begin(), r.end()), t, mod, col);
        coeff[next] = t;
      }
      ++next;
    } else if (rest[col] != 0) {
      return std::nullopt;
    }
  }
  return coeff;
}

inline std::optional<std::vector<Residue>> solve_membership(const HowellBasis& basis,
                                                            std::span<const Residue> v) {
  RawVector raw;
  raw.reserve(v.size());
  for (const auto& r : v) {
    require_same_modulus(r.modulus(), basis.modulus(), "solve_membership");
    raw.push_back(r.value());
  }
  auto c = solve_membership_raw(basis, raw);
  if (!c) return std::nullopt;
  std::vector<Residue> out;
  out.reserve(c->size());
  for (auto x : *c) out.push_back(Residue::from_raw(x, basis.modulus()));
  return out;
}

inline bool contains(const HowellBasis& basis, std::span<const std::uint32_t> v) {
  return solve_membership_raw(basis, v).has_value();
}

/// True when every generator row of `sub` lies in the span of `super`.
inline bool is_submodule(const HowellBasis& sub, const HowellBasis& super) {
  for (std::size_t i = 0; i < sub.rank(); ++i)
    if (!contains(super, sub.matrix.row(i))) return false;
  return true;
}

/// Left kernel {x : x * m == 0} as a Howell basis.
inline HowellBasis kernel(const ModMatrix& m) {
  const auto& mod = m.modulus();
  const std::size_t r = m.rows(), c = m.cols();
  std::vector<RawVector> aug(r, RawVector(c + r, 0));
  for (std::size_t i = 0; i < r; ++i) {
    auto src = m.row(i);
    std::copy(src.begin(), src.end(), aug[i].begin());
    aug[i][c + i] = 1 % mod.q();
  }
  HowellBasis h = detail::howell_from_rows(std::move(aug), c + r, mod);
  std::vector<RawVector> ker;
  for (std::size_t i = 0; i < h.rank(); ++i) {
    if (h.pivots[i] < c) continue;
    auto row = h.matrix.row(i);
    ker.emplace_back(row.begin() + static_cast<std::ptrdiff_t>(c), row.end());
  }
  return detail::howell_from_rows(std::move(ker), r, mod);
}

/// Some x with x * m == v, or nullopt when v is outside the row span of m.
inline std::optional<RawVector> solve_left(const ModMatrix& m, std::span<const std::uint32_t> v) {
  const auto& mod = m.modulus();
  const std::size_t r = m.rows(), c = m.cols();
  if (v.size() != c) throw DimensionMismatch("solve_left: length mismatch");
  std::vector<RawVector> aug(r, RawVector(c + r, 0));
  for (std::size_t i = 0; i < r; ++i) {
    auto src = m.row(i);
    std::copy(src.begin(), src.end(), aug[i].begin());
    aug[i][c + i] = 1 % mod.q();
  }
  HowellBasis h = detail::howell_from_rows(std::move(aug), c + r, mod);
  RawVector rest(v.begin(), v.end());
  rest.resize(c + r, 0);
  RawVector x(r, 0);
  std::size_t next = 0;
  for (std::size_t col = 0; col < c; ++col) {
    if (next < h.rank() && h.pivots[next] == col) {
      if (rest[col] != 0) {
        const std::uint32_t pk = mod.pow_p(h.valuations[next]);
        if (rest[col] % pk != 0) return std::nullopt;
        const std::uint32_t t = rest[col] / pk;
        auto hr = h.matrix.row(next);
        RawVector row(hr.begin(), hr.end());
        detail::row_axpy(rest, row, t, mod, col);
        for (std::size_t k = 0; k < r; ++k) x[k] = mod.add(x[k], mod.mul(t, row[c + k]));
      }
      ++next;
    } else if (rest[col] != 0) {
      return std::nullopt;
    }
  }
  return x;
}

/// Howell basis of the sum of two submodules.
inline HowellBasis submodule_sum(const HowellBasis& a, const HowellBasis& b) {
  return howell_form(ModMatrix::vstack(a.matrix, b.matrix));
}

/// Isomorphism type of a finite Z/p^nZ-module, as the exponents e_i of its
/// cyclic factors Z/p^{e_i}; sorted decreasingly, empty for the trivial module.
struct QuotientInvariants {
  std::uint32_t p = 2;
  std::vector<std::uint32_t> exponents;

  bool trivial() const noexcept { return exponents.empty(); }
  std::uint64_t log_order() const noexcept {
    std::uint64_t s = 0;
    for (auto e : exponents) s += e;
    return s;
  }
  /// The factors p^{e_i} as integers.
  std::vector<std::uint64_t> factors() const {
    std::vector<std::uint64_t> out;
    for (auto e : exponents) {
      std::uint64_t v = 1;
      for (std::uint32_t i = 0; i < e; ++i) v *= p;
      out.push_back(v);
    }
    return out;
  }
  std::string to_string() const {
    std::ostringstream os;
    os << '[';
    auto f = factors();
    for (std::size_t i = 0; i < f.size(); ++i) os << (i ? "," : "") << f[i];
    os << ']';
    return os.str();
  }

  /// Builds the invariants from the sizes log_p|p^i Q| for i = 0..n (the last
  /// entry must be 0).
  static QuotientInvariants from_power_orders(std::uint32_t p, const std::vector<std::uint64_t>& s) {
    QuotientInvariants qi{p, {}};
    const std::size_t n = s.size() - 1;
    // g[i] = number of cyclic factors of order > p^i
    std::vector<std::int64_t> g(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) g[i] = static_cast<std::int64_t>(s[i]) - static_cast<std::int64_t>(s[i + 1]);
    for (std::size_t e = n; e >= 1; --e) {
      std::int64_t cnt = g[e - 1] - g[e];
      for (std::int64_t k = 0; k < cnt; ++k) qi.exponents.push_back(static_cast<std::uint32_t>(e));
    }
    return qi;
  }

  friend bool operator==(const QuotientInvariants& a, const QuotientInvariants& b) noexcept {
    return a.p == b.p && a.exponents == b.exponents;
  }
};

/// Invariant factors of super/sub. Throws when sub is not contained in super.
inline QuotientInvariants quotient_invariants(const HowellBasis& sub, const HowellBasis& super) {
  require_same_modulus(sub.modulus(), super.modulus(), "quotient_invariants");
  if (sub.ambient_dim() != super.ambient_dim())
    throw DimensionMismatch("quotient_invariants: ambient dimensions differ");
  if (!is_submodule(sub, super)) throw Error("quotient_invariants: sub is not contained in super");
  const auto& mod = super.modulus();
  const std::uint64_t sub_log = sub.log_order();
  std::vector<std::uint64_t> s;
  for (std::uint32_t i = 0; i <= mod.n(); ++i) {
    ModMatrix scaled = super.matrix.scaled(mod.pow_p(i) % mod.q());
    HowellBasis sum = howell_form(ModMatrix::vstack(scaled, sub.matrix));
    s.push_back(sum.log_order() - sub_log);
  }
  return QuotientInvariants::from_power_orders(mod.p(), s);
}

}  // namespace h1loc
