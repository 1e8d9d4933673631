#pragma once

// Structured documents: group specs in, scan records and analysis reports out.

#include <array>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "h1loc/verifier.hpp"

namespace h1loc {

using json = nlohmann::ordered_json;

/// Input error with the offending field path in the message.
class InputError : public Error {
 public:
  using Error::Error;
};

struct GroupSpec {
  std::uint32_t p = 2;
  std::uint32_t n = 1;
  std::vector<Mat2> generators;
  std::optional<std::string> label;

  PrimePowerModulus modulus() const { return PrimePowerModulus(p, n); }
};

namespace detail {

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

inline std::uint64_t parse_hex64(const std::string& s) {
  if (s.size() < 3 || s[0] != '0' || s[1] != 'x') throw InputError("hash: expected 0x-prefixed hex, got " + s);
  return std::stoull(s.substr(2), nullptr, 16);
}

inline const json& field(const json& j, const char* name, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected an object");
  auto it = j.find(name);
  if (it == j.end()) throw InputError(where + ": missing field '" + name + "'");
  return *it;
}

inline std::int64_t integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw InputError(where + ": expected an integer");
  return j.get<std::int64_t>();
}

inline json matrix_json(const Mat2& x) { return json::array({json::array({x.a(), x.b()}), json::array({x.c(), x.d()})}); }

inline Mat2 matrix_from_json(const json& j, const PrimePowerModulus& m, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_array() || !j[1].is_array() || j[0].size() != 2 || j[1].size() != 2)
    throw InputError(where + ": expected a 2x2 integer matrix [[a,b],[c,d]]");
  return Mat2(integer(j[0][0], where + "[0][0]"), integer(j[0][1], where + "[0][1]"), integer(j[1][0], where + "[1][0]"),
              integer(j[1][1], where + "[1][1]"), m);
}

}  // namespace detail

/// Reads {"p":..,"n":..,"generators":[[[a,b],[c,d]],..],"label":..}. Entries are
/// reduced mod p^n; every generator must be invertible.
inline GroupSpec group_spec_from_json(const json& j) {
  GroupSpec s;
  const std::int64_t p = detail::integer(detail::field(j, "p", "spec"), "spec.p");
  const std::int64_t n = detail::integer(detail::field(j, "n", "spec"), "spec.n");
  if (p < 2 || p > 65535 || !is_prime(static_cast<std::uint64_t>(p))) throw InputError("spec.p: not a prime");
  if (n < 1) throw InputError("spec.n: must be >= 1");
  s.p = static_cast<std::uint32_t>(p);
  s.n = static_cast<std::uint32_t>(n);
  PrimePowerModulus m(s.p, s.n);
  const json& gens = detail::field(j, "generators", "spec");
  if (!gens.is_array()) throw InputError("spec.generators: expected an array");
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const std::string where = "spec.generators[" + std::to_string(i) + "]";
    Mat2 x = detail::matrix_from_json(gens[i], m, where);
    if (!x.invertible()) throw InputError(where + ": determinant is not a unit mod " + std::to_string(m.q()));
    s.generators.push_back(x);
  }
  if (auto it = j.find("label"); it != j.end()) {
    if (!it->is_string()) throw InputError("spec.label: expected a string");
    s.label = it->get<std::string>();
  }
  return s;
}

inline GroupSpec parse_group_spec(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("spec: malformed JSON: ") + e.what());
  }
  return group_spec_from_json(j);
}

inline json to_json(const GroupSpec& s) {
  json j{{"p", s.p}, {"n", s.n}, {"generators", json::array()}};
  for (const auto& x : s.generators) j["generators"].push_back(detail::matrix_json(x));
  if (s.label) j["label"] = *s.label;
  return j;
}

inline json invariants_json(const QuotientInvariants& q) { return q.factors(); }

inline QuotientInvariants invariants_from_json(const json& j, std::uint32_t p, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected an array of factors");
  QuotientInvariants q;
  q.p = p;
  for (const auto& f : j) {
    std::uint64_t v = static_cast<std::uint64_t>(detail::integer(f, where));
    std::uint32_t e = 0;
    while (v > 1 && v % p == 0) {
      v /= p;
      ++e;
    }
    if (v != 1 || e == 0) throw InputError(where + ": factor is not a positive power of p");
    q.exponents.push_back(e);
  }
  return q;
}

/// One line of a scan: a group, its hypotheses and the main verdict.
struct ScanRecord {
  std::uint64_t hash = 0;
  std::uint64_t order = 0;
  std::uint32_t p = 2;
  std::uint32_t n = 1;
  std::vector<Mat2> generators;
  std::string g1_form;
  std::uint64_t order_rho = 0;
  std::uint32_t lambda1 = 0;
  std::uint32_t lambda2 = 0;
  bool fixed_point = false;
  bool stable_line = false;
  bool nontrivial_scalar = false;
  bool diag_noncyclic = false;
  bool g1_cyclic = false;
  bool checked = false;
  bool applicable = false;
  bool conclusion_checked = false;
  QuotientInvariants h1;
  QuotientInvariants h1_loc;
  std::vector<std::string> violated;
  std::string note;
  std::optional<double> wall_ms;

  bool operator==(const ScanRecord&) const = default;
};

inline json hypotheses_json(const HypothesisReport& h) {
  return json{{"g1_form", to_string(h.g1.form)},
              {"order_rho", h.order_rho},
              {"lambda1", h.lambda1},
              {"lambda2", h.lambda2},
              {"fixed_point_exact_order_p", h.has_fixed_point_exact_order_p},
              {"stabilizes_line_mod_p", h.stabilizes_line_mod_p},
              {"has_nontrivial_scalar", h.has_nontrivial_scalar},
              {"diag_noncyclic", h.diag_noncyclic},
              {"g1_cyclic", h.g1_cyclic}};
}

inline json verdict_json(const TheoremVerdict& v) {
  return json{{"checked", v.checked},
              {"applicable", v.applicable},
              {"conclusion_checked", v.conclusion_checked},
              {"h1", invariants_json(v.h1)},
              {"h1_loc", invariants_json(v.h1_loc)},
              {"violated_hypotheses", v.violated_hypotheses},
              {"note", v.note}};
}

inline json to_json(const ScanRecord& r) {
  json j{{"hash", detail::hex64(r.hash)}, {"p", r.p}, {"n", r.n}, {"order", r.order}, {"generators", json::array()}};
  for (const auto& x : r.generators) j["generators"].push_back(detail::matrix_json(x));
  j["hypotheses"] = json{{"g1_form", r.g1_form},
                         {"order_rho", r.order_rho},
                         {"lambda1", r.lambda1},
                         {"lambda2", r.lambda2},
                         {"fixed_point_exact_order_p", r.fixed_point},
                         {"stabilizes_line_mod_p", r.stable_line},
                         {"has_nontrivial_scalar", r.nontrivial_scalar},
                         {"diag_noncyclic", r.diag_noncyclic},
                         {"g1_cyclic", r.g1_cyclic}};
  j["h1"] = invariants_json(r.h1);
  j["h1_loc"] = invariants_json(r.h1_loc);
  j["verdict"] = json{{"checked", r.checked},
                      {"applicable", r.applicable},
                      {"conclusion_checked", r.conclusion_checked},
                      {"violated_hypotheses", r.violated},
                      {"note", r.note}};
  if (r.wall_ms) j["wall_ms"] = *r.wall_ms;
  return j;
}

inline ScanRecord scan_record_from_json(const json& j) {
  using detail::field;
  ScanRecord r;
  r.hash = detail::parse_hex64(field(j, "hash", "record").get<std::string>());
  r.p = field(j, "p", "record").get<std::uint32_t>();
  r.n = field(j, "n", "record").get<std::uint32_t>();
  r.order = field(j, "order", "record").get<std::uint64_t>();
  const PrimePowerModulus m(r.p, r.n);
  const json& gens = field(j, "generators", "record");
  for (std::size_t i = 0; i < gens.size(); ++i)
    r.generators.push_back(detail::matrix_from_json(gens[i], m, "record.generators[" + std::to_string(i) + "]"));
  const json& h = field(j, "hypotheses", "record");
  r.g1_form = field(h, "g1_form", "record.hypotheses").get<std::string>();
  r.order_rho = field(h, "order_rho", "record.hypotheses").get<std::uint64_t>();
  r.lambda1 = field(h, "lambda1", "record.hypotheses").get<std::uint32_t>();
  r.lambda2 = field(h, "lambda2", "record.hypotheses").get<std::uint32_t>();
  r.fixed_point = field(h, "fixed_point_exact_order_p", "record.hypotheses").get<bool>();
  r.stable_line = field(h, "stabilizes_line_mod_p", "record.hypotheses").get<bool>();
  r.nontrivial_scalar = field(h, "has_nontrivial_scalar", "record.hypotheses").get<bool>();
  r.diag_noncyclic = field(h, "diag_noncyclic", "record.hypotheses").get<bool>();
  r.g1_cyclic = field(h, "g1_cyclic", "record.hypotheses").get<bool>();
  r.h1 = invariants_from_json(field(j, "h1", "record"), r.p, "record.h1");
  r.h1_loc = invariants_from_json(field(j, "h1_loc", "record"), r.p, "record.h1_loc");
  const json& v = field(j, "verdict", "record");
  r.checked = field(v, "checked", "record.verdict").get<bool>();
  r.applicable = field(v, "applicable", "record.verdict").get<bool>();
  r.conclusion_checked = field(v, "conclusion_checked", "record.verdict").get<bool>();
  r.violated = field(v, "violated_hypotheses", "record.verdict").get<std::vector<std::string>>();
  r.note = field(v, "note", "record.verdict").get<std::string>();
  if (auto it = j.find("wall_ms"); it != j.end()) r.wall_ms = it->get<double>();
  return r;
}

inline ScanRecord parse_scan_record(const std::string& line) {
  try {
    return scan_record_from_json(json::parse(line));
  } catch (const json::exception& e) {
    throw InputError(std::string("record: ") + e.what());
  }
}

inline json to_json(const ConstantsTable& t) {
  json j{{"degree", t.degree},
         {"S", t.s_set},
         {"S_tilde", t.s_tilde},
         {"quadratic_minimal_set", t.quadratic_set},
         {"p0_bound", t.p0_bound},
         {"largest_prime_at_most_p0", t.largest_prime_in_bound}};
  if (t.c) j["C"] = *t.c;
  else j["C"] = t.symbolic;
  return j;
}

inline std::string constants_table_text(const ConstantsTable& t) {
  auto set = [](const std::vector<std::uint32_t>& v) {
    std::string s = "{";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s + "}";
  };
  std::ostringstream os;
  os << "degree                     " << t.degree << '\n';
  os << "C                          " << (t.c ? std::to_string(*t.c) : t.symbolic) << '\n';
  os << "S                          " << set(t.s_set) << '\n';
  os << "S~                         " << set(t.s_tilde) << '\n';
  os << "quadratic minimal set      " << set(t.quadratic_set) << '\n';
  os << "p0 bound (2d+1)            " << t.p0_bound << '\n';
  os << "largest prime <= p0 bound  " << t.largest_prime_in_bound << '\n';
  return os.str();
}

}  // namespace h1loc
