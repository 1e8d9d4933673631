#pragma once

// Scans (many groups, one record each) and single-group analysis reports.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include "h1loc/enumerate.hpp"
#include "h1loc/report.hpp"

namespace h1loc {

/// Runs f(i) for i in [0, n) on a small thread pool. Results are stored by
/// index, so the output does not depend on scheduling. The first exception by
/// index is rethrown after all workers finish.
template <class T>
std::vector<T> parallel_map(std::size_t n, const std::function<T(std::size_t)>& f, unsigned threads = 0) {
  if (!threads) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  std::vector<std::optional<T>> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<T> res;
  res.reserve(n);
  for (auto& v : out) res.push_back(std::move(*v));
  return res;
}

/// Hypotheses plus the main verdict of one group. Falsification propagates.
inline ScanRecord scan_record(const Group& g, std::size_t budget, bool timing = false) {
  const auto t0 = std::chrono::steady_clock::now();
  const HypothesisReport hyp = hypothesis_report(g);
  const TheoremVerdict v = theorem1_verdict(g, budget, &hyp);
  ScanRecord r;
  r.hash = g.hash();
  r.order = g.order();
  r.p = g.modulus().p();
  r.n = g.modulus().n();
  r.generators = g.generators();
  r.g1_form = to_string(hyp.g1.form);
  r.order_rho = hyp.order_rho;
  r.lambda1 = hyp.lambda1;
  r.lambda2 = hyp.lambda2;
  r.fixed_point = hyp.has_fixed_point_exact_order_p;
  r.stable_line = hyp.stabilizes_line_mod_p;
  r.nontrivial_scalar = hyp.has_nontrivial_scalar;
  r.diag_noncyclic = hyp.diag_noncyclic;
  r.g1_cyclic = hyp.g1_cyclic;
  r.checked = v.checked;
  r.applicable = v.applicable;
  r.conclusion_checked = v.conclusion_checked;
  r.h1 = v.h1;
  r.h1_loc = v.h1_loc;
  r.violated = v.violated_hypotheses;
  r.note = v.note;
  if (timing)
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

enum class ScanMode { exhaustive, sample };

struct ScanOptions {
  std::uint32_t p = 2;
  std::uint32_t n = 1;
  ScanMode mode = ScanMode::exhaustive;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::size_t budget = kDefaultCohomologyBudget;
  std::size_t max_order = 0;  // exhaustive: skip larger subgroups
  bool require_full_det = false;
  bool timing = false;
  unsigned threads = 0;
};

struct ScanSummary {
  std::size_t records = 0;
  std::size_t unchecked = 0;  // over the cohomology budget
  std::size_t applicable = 0;
  std::size_t h1_nontrivial = 0;
  std::size_t h1_loc_nontrivial = 0;
  std::size_t h1_loc_nontrivial_applicable = 0;  // must stay zero
  std::size_t draws = 0;
  std::size_t over_budget_draws = 0;
  bool sentinel_ok() const noexcept { return h1_loc_nontrivial_applicable == 0; }
};

struct ScanResult {
  std::vector<ScanRecord> records;  // sorted by hash
  ScanSummary summary;
};

inline ScanResult run_scan(const ScanOptions& opt) {
  const PrimePowerModulus m(opt.p, opt.n);
  std::vector<Group> groups;
  ScanResult res;
  if (opt.mode == ScanMode::exhaustive) {
    groups = exhaustive_subgroups(m, opt.max_order);
    if (opt.require_full_det)
      std::erase_if(groups, [](const Group& g) { return !has_full_determinant(g); });
  } else {
    SampleOptions so;
    so.count = opt.count;
    so.seed = opt.seed;
    so.budget = opt.budget;
    so.require_full_det = opt.require_full_det;
    SampleResult sr = sample_subgroups(m, so);
    res.summary.draws = sr.draws;
    res.summary.over_budget_draws = sr.over_budget;
    groups = std::move(sr.groups);
  }
  res.records = parallel_map<ScanRecord>(
      groups.size(), [&](std::size_t i) { return scan_record(groups[i], opt.budget, opt.timing); }, opt.threads);
  std::sort(res.records.begin(), res.records.end(),
            [](const ScanRecord& a, const ScanRecord& b) { return a.hash < b.hash; });
  ScanSummary& s = res.summary;
  s.records = res.records.size();
  for (const auto& r : res.records) {
    if (!r.checked) {
      ++s.unchecked;
      continue;
    }
    if (r.applicable) ++s.applicable;
    if (!r.h1.trivial()) ++s.h1_nontrivial;
    if (!r.h1_loc.trivial()) {
      ++s.h1_loc_nontrivial;
      if (r.applicable) ++s.h1_loc_nontrivial_applicable;
    }
  }
  return res;
}

inline const char* to_string(ScanMode m) { return m == ScanMode::exhaustive ? "exhaustive" : "sample"; }

inline json summary_json(const ScanOptions& opt, const ScanSummary& s) {
  json j{{"summary", true},
         {"p", opt.p},
         {"n", opt.n},
         {"mode", to_string(opt.mode)},
         {"seed", opt.seed},
         {"budget", opt.budget},
         {"records", s.records},
         {"unchecked_over_budget", s.unchecked},
         {"applicable", s.applicable},
         {"h1_nontrivial", s.h1_nontrivial},
         {"h1_loc_nontrivial", s.h1_loc_nontrivial},
         {"sentinel", s.sentinel_ok() ? "pass" : "fail"}};
  if (opt.mode == ScanMode::sample) {
    j["requested"] = opt.count;
    j["draws"] = s.draws;
    j["over_budget_draws"] = s.over_budget_draws;
  }
  if (opt.require_full_det) j["require_full_det"] = true;
  return j;
}

namespace detail {

inline json slice_orders_json(const TriangularSlices& s) {
  return json{{"D", s.diag.order()},
              {"sU", s.strict_upper.order()},
              {"sL", s.strict_lower.order()},
              {"U", s.upper.order()},
              {"L", s.lower.order()}};
}

}  // namespace detail

/// Full single-group report: structure, cohomology and every verdict.
/// Falsification propagates to the caller.
inline json analyze(const GroupSpec& spec, std::size_t budget) {
  const PrimePowerModulus m = spec.modulus();
  const Group g = close(spec.generators, m, std::max<std::size_t>(budget, kDefaultClosureCap) + 1);
  json j;
  if (spec.label) j["label"] = *spec.label;
  j["p"] = spec.p;
  j["n"] = spec.n;
  j["hash"] = detail::hex64(g.hash());
  j["order"] = g.order();
  j["budget"] = budget;

  const HypothesisReport hyp = hypothesis_report(g);
  j["hypotheses"] = hypotheses_json(hyp);
  json cls{{"form", to_string(hyp.g1.form)}};
  if (hyp.g1.in_normal_form()) {
    cls["rho"] = detail::matrix_json(hyp.g1.rho);
    cls["basis_change"] = detail::matrix_json(hyp.g1.basis_change);
  }
  j["g1_classification"] = cls;
  j["slices"] = detail::slice_orders_json(triangular_slices(g));

  auto lift = diagonal_rho_lift(g);
  if (lift) {
    json l{{"rho_n", detail::matrix_json(lift->matrix)},
           {"basis", detail::matrix_json(lift->basis_change)},
           {"order", lift->order},
           {"lambda1", lift->lambda1},
           {"lambda2", lift->lambda2}};
    const Group hn = sylow_p(lift->conjugated);
    l["H_n_order"] = hn.order();
    l["slices_in_lift_basis"] = detail::slice_orders_json(triangular_slices(lift->conjugated));
    if (m.n() >= 2 && lift->order >= 3 && lift->eigen_ratio_invertible() && hn.order() <= budget) {
      try {
        HnDecomposer dec(hn, *lift);
        for (const auto& tau : hn.elements()) dec.decompose(tau);
        l["H_n_decomposed"] = hn.order();
      } catch (const PreconditionFailed& e) {
        l["H_n_decomposition_skipped"] = e.what();
      }
    }
    j["rho_lift"] = l;
  }

  const Action act(g, budget);
  if (!act.within_budget()) {
    j["cohomology"] = json{{"checked", false}, {"note", "group exceeds cohomology budget"}};
    return j;
  }
  const CohomologyData d = compute_cohomology(act);
  j["cohomology"] = json{{"checked", true},
                         {"Z1_log_order", d.z1.log_order()},
                         {"B1_log_order", d.b1.log_order()},
                         {"Z1_loc_log_order", d.z1_loc.log_order()},
                         {"h1", invariants_json(d.h1)},
                         {"h1_loc", invariants_json(d.h1_loc)}};
  json verdicts;
  verdicts["theorem1"] = verdict_json(theorem1_verdict(g, budget, &hyp));
  const Prop8Verdict p8 = proposition8_verdict(g, budget);
  json v8 = verdict_json(p8.verdict);
  v8["case"] = to_string(p8.which);
  verdicts["proposition8"] = v8;
  const Prop16Report p16 = proposition16_suite(g, budget);
  json v16{{"ran", p16.ran}};
  if (!p16.ran) v16["skip_reason"] = p16.skip_reason;
  for (const auto& c : p16.checks)
    v16["subgroups"].push_back(
        json{{"name", c.name}, {"order", c.order}, {"h1_loc", invariants_json(c.h1_loc)}, {"asserted", c.asserted}});
  if (p16.ran) {
    v16["sL_n_cyclic"] = p16.lower_unipotent_cyclic;
    v16["gluing_checked"] = p16.gluing_checked;
    if (p16.gluing_checked) v16["gluing_holds"] = p16.gluing_holds;
  }
  verdicts["proposition16"] = v16;
  j["verdicts"] = verdicts;
  return j;
}

}  // namespace h1loc
