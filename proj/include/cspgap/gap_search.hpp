#pragma once
// Integrality-gap search over instance streams and certificate verification.

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "cspgap/basic_lp.hpp"
#include "cspgap/dichotomy.hpp"
#include "cspgap/enumerate.hpp"
#include "cspgap/version.hpp"

namespace cspgap {

struct SearchConfig {
  FamilyPtr family;
  int n_min = 2;
  int n_max = 2;
  std::size_t max_constraints = 1;
  StreamMode mode = StreamMode::exhaustive;
  std::uint64_t seed = 0;
  std::uint64_t budget = 100000;  // instance evaluations
  Rational gamma = 1;
  Rational beta = 0;
  bool up_to_renaming = false;
  bool maximize_gap = false;
  std::uint64_t brute_force_budget = kDefaultBruteForceBudget;
  std::uint64_t no_sup_budget = 4096;
  std::uint64_t falsifier_seeds = 16;  // seeds seed, seed+1, ... for no_sup_search

  void validate() const {
    if (!family) throw ValidationError("search config has no family");
    if (beta.sign() < 0 || !(beta < gamma) || gamma > 1) throw ValidationError("need 0 <= beta < gamma <= 1");
    if (n_min < family->k()) throw ValidationError("n_min must be >= k");
    if (n_max < n_min) throw ValidationError("n_max must be >= n_min");
    if (max_constraints < 1) throw ValidationError("max_constraints must be >= 1");
    if (budget == 0) throw ValidationError("budget must be positive");
    if (falsifier_seeds == 0) throw ValidationError("at least one falsifier seed is required");
  }
};

inline InstanceStream enumerate_instances(const SearchConfig& cfg) {
  cfg.validate();
  return InstanceStream({cfg.family, cfg.n_min, cfg.n_max, cfg.max_constraints, cfg.mode, cfg.seed, cfg.up_to_renaming});
}

struct GapCertificate {
  Instance instance;
  Rational gamma, beta;
  Rational lp_value, csp_value;
  Assignment csp_witness;
  LocalDistributionSolution solution;
  PairDistribution yes, no;
  MarginalVector marginals;
  Rational no_sup_bound;
  SymbolKernel no_sup_kernel;
  std::uint64_t no_sup_budget = 0;
  std::uint64_t no_sup_seed = 0;
  std::uint64_t brute_force_budget = kDefaultBruteForceBudget;
  std::uint64_t seed = 0;
  std::string toolkit_version = kToolkitVersion;
};

/// Runs the YES/NO construction on a gap instance and bundles every claim.
inline GapCertificate make_certificate(const Instance& inst, const GapReport& report, const Rational& gamma,
                                       const Rational& beta, std::uint64_t seed, std::uint64_t no_sup_budget,
                                       std::uint64_t falsifier_seeds, std::uint64_t brute_force_budget) {
  ConstructOptions opt;
  opt.csp_opt = report.csp_value;
  opt.no_sup_budget = no_sup_budget;
  opt.brute_force_budget = brute_force_budget;
  opt.seeds.clear();
  for (std::uint64_t s = 0; s < falsifier_seeds; ++s) opt.seeds.push_back(seed + s);
  auto yn = construct_yes_no(inst, report.lp_witness, opt);
  return GapCertificate{inst,
                        gamma,
                        beta,
                        report.lp_value,
                        report.csp_value,
                        report.csp_witness,
                        report.lp_witness,
                        std::move(yn.yes),
                        std::move(yn.no),
                        std::move(yn.marginals),
                        yn.falsifier.bound,
                        std::move(yn.falsifier.kernel),
                        no_sup_budget,
                        yn.falsifier_seed,
                        brute_force_budget,
                        seed};
}

struct SearchProgress {
  std::uint64_t evaluated = 0;
  std::uint64_t hits = 0;
  std::optional<Rational> best_gap;  // lp - csp over hits so far
};

struct SearchResult {
  std::optional<GapCertificate> certificate;
  SearchProgress stats;
  bool stream_exhausted = false;  // false with no certificate: the budget ran out
};

/// First instance in stream order that is a (gamma, beta)-gap, or with
/// maximize_gap the one maximizing lp - csp (earliest wins ties). Batches are
/// evaluated on CSPGAP_THREADS workers and reduced in stream order.
inline SearchResult search_gap(const SearchConfig& cfg,
                               const std::function<void(const SearchProgress&)>& progress = {}) {
  cfg.validate();
  auto stream = enumerate_instances(cfg);
  const unsigned workers = worker_count();
  const std::size_t batch_size = std::max<std::size_t>(64, std::size_t{workers} * 16);

  SearchResult out;
  std::optional<Instance> best_inst;
  std::optional<GapReport> best_report;
  std::vector<Instance> batch;
  std::vector<std::optional<GapReport>> reports;

  while (out.stats.evaluated < cfg.budget) {
    batch.clear();
    while (batch.size() < batch_size && out.stats.evaluated + batch.size() < cfg.budget) {
      auto inst = stream.next();
      if (!inst) break;
      batch.push_back(std::move(*inst));
    }
    if (batch.empty()) {
      out.stream_exhausted = true;
      break;
    }
    reports.assign(batch.size(), std::nullopt);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto work = [&] {
      try {
        for (std::size_t i; (i = next.fetch_add(1)) < batch.size() && !failed;) {
          auto csp = brute_force_opt(batch[i], cfg.brute_force_budget, 1);
          auto lp = solve_basic_lp(batch[i]);
          if (lp.value < csp.value) throw InternalError("basic LP value below the CSP optimum");
          reports[i] = GapReport{lp.value, csp.value, std::move(csp.witness), std::move(lp)};
        }
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    };
    const unsigned used = static_cast<unsigned>(std::min<std::size_t>(workers, batch.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < used; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    bool stop = false;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      ++out.stats.evaluated;
      const auto& r = *reports[i];
      if (!r.is_gap(cfg.gamma, cfg.beta)) continue;
      ++out.stats.hits;
      const Rational gap = r.lp_value - r.csp_value;
      if (!out.stats.best_gap || gap > *out.stats.best_gap) {
        out.stats.best_gap = gap;
        best_inst = batch[i];
        best_report = r;
      }
      if (!cfg.maximize_gap) {
        stop = true;
        break;
      }
    }
    if (progress) progress(out.stats);
    if (stop) break;
  }
  if (best_inst)
    out.certificate = make_certificate(*best_inst, *best_report, cfg.gamma, cfg.beta, cfg.seed, cfg.no_sup_budget,
                                       cfg.falsifier_seeds, cfg.brute_force_budget);
  return out;
}

// ---------------------------------------------------------------------------
// Verification

enum class VerifyOutcome { pass, pass_except_csp_bound, fail };

struct VerifyReport {
  VerifyOutcome outcome = VerifyOutcome::pass;
  std::string clause;  // first violated clause, or the reason for a partial pass

  bool ok() const { return outcome != VerifyOutcome::fail; }
};

namespace detail {
inline std::string mu_index(const PredicateFamily& fam, const std::array<std::size_t, 3>& at) {
  return "(" + fam[at[0]].name + "," + std::to_string(at[1] + 1) + "," + std::to_string(at[2]) + ")";
}
}  // namespace detail

/// Re-checks every claim of the certificate from the instance up; nothing in
/// the certificate is trusted. Stops at the first violated clause.
inline VerifyReport verify_certificate(const GapCertificate& c) {
  auto fail = [](std::string why) { return VerifyReport{VerifyOutcome::fail, std::move(why)}; };
  const Instance& inst = c.instance;
  const auto& fam = inst.family();

  if (c.beta.sign() < 0 || !(c.beta < c.gamma) || c.gamma > 1) return fail("parameters violate 0 <= beta < gamma <= 1");

  // LP side: the bundled solution is feasible, has the claimed value, and the value is optimal.
  if (auto err = check_local_solution(inst, c.solution)) return fail("LP solution: " + *err);
  if (c.solution.value != c.lp_value) return fail("lp_value differs from the solution objective");
  if (c.lp_value < c.gamma) return fail("completeness: lp_value below gamma");
  if (solve_basic_lp(inst).value != c.lp_value) return fail("lp_value is not the basic LP optimum");

  // CSP side.
  try {
    check_assignment(inst, c.csp_witness);
  } catch (const Error& e) {
    return fail(std::string("csp witness: ") + e.what());
  }
  if (csp_value(inst, c.csp_witness) != c.csp_value) return fail("csp witness does not attain csp_value");
  if (c.csp_value > c.beta) return fail("soundness: csp_value above beta");

  // Distributions: recomputed from the instance and solution and compared atom by atom.
  if (auto err = check_pair_distribution(c.yes)) return fail("D^YES: " + *err);
  if (auto err = check_pair_distribution(c.no)) return fail("D^NO: " + *err);
  PairDistribution yes(inst.family_ptr()), no(inst.family_ptr());
  {
    const int k = fam.k();
    for (std::size_t ci = 0; ci < inst.m(); ++ci) {
      const auto& con = inst.constraints()[ci];
      const Rational w = inst.weight_fraction(ci);
      for (std::size_t a = 0; a < fam.tuple_count(); ++a) {
        yes.at(con.predicate, a) += w * c.solution.local[ci][a];
        const auto t = decode_tuple(a, fam.q(), k);
        Rational prod = w;
        for (int l = 0; l < k; ++l)
          prod *= c.solution.marginals[static_cast<std::size_t>(con.vars[static_cast<std::size_t>(l)])]
                                      [static_cast<std::size_t>(t[static_cast<std::size_t>(l)])];
        no.at(con.predicate, a) += prod;
      }
    }
  }
  if (!(yes == c.yes)) return fail("D^YES does not match the construction from the LP solution");
  if (!(no == c.no)) return fail("D^NO does not match the construction from the LP solution");

  const auto mu_yes = marginal_vector(c.yes);
  const auto mu_no = marginal_vector(c.no);
  if (auto at = c.marginals.first_mismatch(mu_yes)) return fail("marginal mismatch at " + detail::mu_index(fam, *at));
  if (auto at = mu_yes.first_mismatch(mu_no)) return fail("marginal mismatch at " + detail::mu_index(fam, *at));
  if (yes_value(c.yes) < c.lp_value) return fail("yes_value(D^YES) below lp_value");
  if (yes_value(c.yes) != c.lp_value) return fail("yes_value(D^YES) differs from lp_value");

  // NO side spot checks.
  if (auto err = check_kernel(c.no_sup_kernel, fam.q())) return fail("no_sup kernel: " + *err);
  if (no_value(c.no, c.no_sup_kernel) != c.no_sup_bound) return fail("no_sup bound is not no_value at the kernel");
  if (no_value(c.no, SymbolKernel::identity(fam.q())) != yes_value(c.no)) return fail("identity kernel check failed");
  if (c.no_sup_bound > c.csp_value) return fail("no_sup bound exceeds csp_value");
  if (no_sup_search(c.no, c.no_sup_budget, c.no_sup_seed).bound != c.no_sup_bound)
    return fail("no_sup bound is not reproduced by the recorded seed and budget");

  // Brute-force attestation last, since it is the only step that can be too large.
  try {
    auto bf = brute_force_opt(inst, c.brute_force_budget);
    if (bf.value != c.csp_value) return fail("csp_value is not the brute-force optimum");
  } catch (const BudgetExceeded& e) {
    return {VerifyOutcome::pass_except_csp_bound, std::string("verified except csp bound: ") + e.what()};
  }
  return {};
}

}  // namespace cspgap
