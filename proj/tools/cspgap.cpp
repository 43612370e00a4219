// cspgap: basic-LP analysis of finite CSP predicate families.
//
// Exit status: 0 affirmative, 1 negative, 2 operational error.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "cspgap/basic_lp.hpp"
#include "cspgap/dichotomy.hpp"
#include "cspgap/gap_search.hpp"
#include "cspgap/io.hpp"
#include "cspgap/rho.hpp"
#include "cspgap/width.hpp"

using namespace cspgap;
using io::json;

namespace {

struct Options {
  std::string input;
  std::string out;
  bool as_json = false;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> budget;
  std::string precision = "1/1024";
  std::string gamma, beta;
  bool brute_force = false;
  bool maximize_gap = false;
  bool dump = false;
  std::string dump_lp;
  int n_min = 0, n_max = 5;
  std::size_t max_constraints = 5;
  std::string mode = "exhaustive";
  bool up_to_renaming = false;
  std::uint64_t no_sup_budget = 4096;
  std::uint64_t falsifier_seeds = 16;
};

Rational rational_option(const std::string& text, const char* flag) {
  try {
    return parse_rational(text);
  } catch (const Error& e) {
    throw ValidationError(std::string(flag) + ": " + e.what());
  }
}

std::pair<Rational, Rational> gamma_beta(const Options& o) {
  if (o.gamma.empty() || o.beta.empty()) throw ValidationError("--gamma and --beta are required");
  Rational g = rational_option(o.gamma, "--gamma");
  Rational b = rational_option(o.beta, "--beta");
  if (b.sign() < 0 || !(b < g) || g > 1) throw ValidationError("need 0 <= beta < gamma <= 1");
  return {g, b};
}

void write_certificate(const Options& o, const GapCertificate& cert) {
  if (o.out.empty()) return;
  io::write_file(o.out, io::dump(io::certificate_to_json(cert)));
  std::cerr << "certificate written to " << o.out << "\n";
}

int family_stats(const Options& o) {
  auto fam = io::load_family(o.input);
  const Rational precision = rational_option(o.precision, "--precision");
  const std::uint64_t budget = o.budget.value_or(2000);
  const int n_max = std::max(o.n_max, fam->k());
  const auto lower = rho_product_lower(*fam, precision);
  const auto upper = rho_upper_empirical(fam, n_max, budget, o.seed);
  const auto w = width(*fam);
  ClassificationOptions copt;
  copt.n_max = n_max;
  copt.rho_budget = budget;
  const auto cls = support_classification(fam, precision, copt);

  std::string cls_text = to_string(cls.kind);
  if (cls.kind == SupportKind::weak) {
    cls_text += "(";
    for (std::size_t i = 0; i < cls.subfamily.size(); ++i) cls_text += (i ? "," : "") + (*fam)[cls.subfamily[i]].name;
    cls_text += ")";
  }

  if (o.as_json) {
    json preds = json::array();
    for (std::size_t f = 0; f < fam->size(); ++f)
      preds.push_back({{"name", (*fam)[f].name},
                       {"width", to_string(w.per_predicate[f].width)},
                       {"width_base", tuple_string(w.per_predicate[f].base)},
                       {"onewise", static_cast<bool>(cls.supports[f])}});
    json dist = json::array();
    for (const auto& p : lower.distribution) dist.push_back(to_string(p));
    json j = {{"q", fam->q()},
              {"k", fam->k()},
              {"predicates", preds},
              {"rho_lower", to_string(lower.value)},
              {"rho_lower_distribution", dist},
              {"rho_lower_slack", to_string(lower.certified_gap)},
              {"rho_upper", to_string(upper.value)},
              {"rho_upper_evaluated", upper.evaluated},
              {"rho_upper_witness", io::instance_to_json(*upper.witness)},
              {"width", to_string(w.value)},
              {"support", cls_text}};
    std::cout << io::dump(j);
    return 0;
  }
  std::cout << "q = " << fam->q() << ", k = " << fam->k() << ", |F| = " << fam->size() << "\n";
  std::cout << "rho in [" << to_string(lower.value) << ", " << to_string(upper.value) << "]";
  if (lower.value == upper.value) std::cout << "  (collapsed)";
  std::cout << "\n  lower: product distribution (";
  for (std::size_t i = 0; i < lower.distribution.size(); ++i)
    std::cout << (i ? ", " : "") << to_string(lower.distribution[i]);
  std::cout << "), maximin within " << to_string(lower.certified_gap) << "\n";
  std::cout << "  upper: best of " << upper.evaluated << " instances, n = " << upper.witness->n()
            << ", m = " << upper.witness->m() << "\n";
  std::cout << "width = " << to_string(w.value) << (w.value == 1 ? "  (wide)" : "") << "\n";
  for (std::size_t f = 0; f < fam->size(); ++f)
    std::cout << "  " << (*fam)[f].name << ": width " << to_string(w.per_predicate[f].width) << " at b = "
              << tuple_string(w.per_predicate[f].base) << (cls.supports[f] ? ", supports one-wise independence" : "")
              << "\n";
  std::cout << "one-wise support: " << cls_text << "\n";
  return 0;
}

int lp_solve(const Options& o) {
  const Instance inst = io::load_instance(o.input);
  const LpProblem lp = build_basic_lp(inst);
  if (!o.dump_lp.empty()) {
    std::ofstream out(o.dump_lp);
    if (!out) throw Error("cannot write " + o.dump_lp);
    write_lp_text(out, lp);
  }
  const auto sol = solve_basic_lp(inst);
  std::optional<CspOptimum> csp;
  if (o.brute_force) csp = brute_force_opt(inst, o.budget.value_or(kDefaultBruteForceBudget));
  const auto& fam = inst.family();

  if (o.as_json) {
    json j = {{"lp_value", to_string(sol.value)}, {"n", inst.n()}, {"m", inst.m()}};
    if (csp) {
      j["csp_value"] = to_string(csp->value);
      j["csp_witness"] = tuple_string(csp->witness.values);
    }
    if (o.dump) {
      json local = json::array();
      for (const auto& y : sol.local) {
        json m = json::object();
        for (std::size_t a = 0; a < y.size(); ++a)
          if (!y[a].is_zero()) m[tuple_string(decode_tuple(a, fam.q(), fam.k()))] = to_string(y[a]);
        local.push_back(m);
      }
      json marg = json::array();
      for (const auto& x : sol.marginals) {
        json row = json::array();
        for (const auto& v : x) row.push_back(to_string(v));
        marg.push_back(row);
      }
      j["local"] = local;
      j["marginals"] = marg;
    }
    std::cout << io::dump(j);
    return 0;
  }
  std::cout << "opt^LP = " << to_string(sol.value) << "\n";
  if (csp) std::cout << "opt^CSP = " << to_string(csp->value) << "  (witness " << tuple_string(csp->witness.values) << ")\n";
  if (o.dump) {
    for (std::size_t i = 0; i < sol.marginals.size(); ++i) {
      std::cout << "X_" << i + 1 << ":";
      for (const auto& v : sol.marginals[i]) std::cout << " " << to_string(v);
      std::cout << "\n";
    }
    for (std::size_t c = 0; c < sol.local.size(); ++c) {
      std::cout << "Y_" << c + 1 << ":";
      for (std::size_t a = 0; a < sol.local[c].size(); ++a)
        if (!sol.local[c][a].is_zero())
          std::cout << " " << tuple_string(decode_tuple(a, fam.q(), fam.k())) << "=" << to_string(sol.local[c][a]);
      std::cout << "\n";
    }
  }
  return 0;
}

int gap_check(const Options& o) {
  const Instance inst = io::load_instance(o.input);
  const auto [gamma, beta] = gamma_beta(o);
  const std::uint64_t bf = o.budget.value_or(kDefaultBruteForceBudget);
  const auto report = gap_report(inst, bf);
  const bool complete = report.lp_value >= gamma;
  const bool sound = report.csp_value <= beta;
  std::optional<GapCertificate> cert;
  if (complete && sound)
    cert = make_certificate(inst, report, gamma, beta, o.seed, o.no_sup_budget, o.falsifier_seeds, bf);

  if (o.as_json) {
    json j = {{"lp_value", to_string(report.lp_value)},
              {"csp_value", to_string(report.csp_value)},
              {"gamma", to_string(gamma)},
              {"beta", to_string(beta)},
              {"completeness", complete},
              {"soundness", sound},
              {"gap", complete && sound}};
    if (cert) j["digest"] = io::certificate_to_json(*cert)["digest"];
    std::cout << io::dump(j);
  } else {
    std::cout << "opt^LP = " << to_string(report.lp_value) << ", opt^CSP = " << to_string(report.csp_value) << "\n";
    if (cert) {
      std::cout << "gap instance for (gamma, beta) = (" << to_string(gamma) << ", " << to_string(beta) << ")\n";
    } else {
      if (!complete)
        std::cout << "completeness fails: " << to_string(report.lp_value) << " < " << to_string(gamma) << "\n";
      if (!sound) std::cout << "soundness fails: " << to_string(report.csp_value) << " > " << to_string(beta) << "\n";
    }
  }
  if (!cert) return 1;
  write_certificate(o, *cert);
  return 0;
}

int gap_search(const Options& o) {
  SearchConfig cfg;
  cfg.family = io::load_family(o.input);
  std::tie(cfg.gamma, cfg.beta) = gamma_beta(o);
  cfg.n_min = o.n_min > 0 ? o.n_min : cfg.family->k();
  cfg.n_max = o.n_max;
  cfg.max_constraints = o.max_constraints;
  if (o.mode == "exhaustive") cfg.mode = StreamMode::exhaustive;
  else if (o.mode == "random") cfg.mode = StreamMode::random;
  else throw ValidationError("--mode must be exhaustive or random");
  cfg.seed = o.seed;
  cfg.budget = o.budget.value_or(100000);
  cfg.up_to_renaming = o.up_to_renaming;
  cfg.maximize_gap = o.maximize_gap;
  cfg.no_sup_budget = o.no_sup_budget;
  cfg.falsifier_seeds = o.falsifier_seeds;

  auto result = search_gap(cfg, [](const SearchProgress& p) {
    std::cerr << "evaluated " << p.evaluated << ", gap instances " << p.hits;
    if (p.best_gap) std::cerr << ", best gap " << to_string(*p.best_gap);
    std::cerr << "\n";
  });

  if (o.as_json) {
    json j = {{"evaluated", result.stats.evaluated},
              {"hits", result.stats.hits},
              {"found", result.certificate.has_value()},
              {"stream_exhausted", result.stream_exhausted}};
    if (result.certificate) {
      auto cj = io::certificate_to_json(*result.certificate);
      j["instance"] = cj["instance"];
      j["lp_value"] = cj["lp_value"];
      j["csp_value"] = cj["csp_value"];
      j["digest"] = cj["digest"];
    }
    std::cout << io::dump(j);
  } else if (result.certificate) {
    const auto& c = *result.certificate;
    std::cout << "found after " << result.stats.evaluated << " instances: n = " << c.instance.n()
              << ", m = " << c.instance.m() << ", opt^LP = " << to_string(c.lp_value)
              << ", opt^CSP = " << to_string(c.csp_value) << "\n";
    for (const auto& con : c.instance.constraints()) {
      std::cout << "  " << c.instance.family()[con.predicate].name << "(";
      for (std::size_t l = 0; l < con.vars.size(); ++l) std::cout << (l ? "," : "") << con.vars[l] + 1;
      std::cout << ")" << (con.weight != 1 ? " x" + std::to_string(con.weight) : "") << "\n";
    }
  } else {
    std::cout << "no gap instance in " << result.stats.evaluated << " instances"
              << (result.stream_exhausted ? " (stream exhausted)" : " (budget exhausted)") << "\n";
  }
  if (!result.certificate) return 1;
  write_certificate(o, *result.certificate);
  return 0;
}

int verify_cert(const Options& o) {
  const std::string text = io::read_file(o.input);
  const auto report = io::verify_certificate_json(io::parse_text(text, o.input));
  if (o.as_json) {
    std::cout << io::dump({{"pass", report.ok()},
                           {"complete", report.outcome == VerifyOutcome::pass},
                           {"clause", report.clause}});
  } else if (report.outcome == VerifyOutcome::pass) {
    std::cout << "PASS\n";
  } else if (report.outcome == VerifyOutcome::pass_except_csp_bound) {
    std::cout << "PASS (" << report.clause << ")\n";
  } else {
    std::cout << "FAIL: " << report.clause << "\n";
  }
  return report.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Basic-LP analysis of finite CSP predicate families"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, const char* what) {
    sub->add_option("input", o.input, what)->required()->check(CLI::ExistingFile);
    sub->add_flag("--json", o.as_json, "Machine-readable report on stdout");
    sub->add_option("--seed", o.seed, "Random seed");
  };

  auto* fs = app.add_subcommand("family-stats", "Threshold bracket, width and one-wise support of a family");
  common(fs, "Family file");
  fs->add_option("--precision", o.precision, "Precision of the product lower bound (p/q)");
  fs->add_option("--budget", o.budget, "Instances evaluated for the upper bound");
  fs->add_option("--n-max", o.n_max, "Largest instance size for the upper bound");

  auto* ls = app.add_subcommand("lp-solve", "Solve the basic LP of an instance exactly");
  common(ls, "Instance file");
  ls->add_flag("--brute-force", o.brute_force, "Also compute opt^CSP by enumeration");
  ls->add_option("--budget", o.budget, "Brute-force assignment budget");
  ls->add_flag("--dump", o.dump, "Print the local distributions and marginals");
  ls->add_option("--dump-lp", o.dump_lp, "Write the LP in text form to this path");

  auto* gc = app.add_subcommand("gap-check", "Decide whether an instance is a (gamma, beta) gap instance");
  common(gc, "Instance file");
  gc->add_option("--gamma", o.gamma, "Completeness threshold (p/q)")->required();
  gc->add_option("--beta", o.beta, "Soundness threshold (p/q)")->required();
  gc->add_option("--budget", o.budget, "Brute-force assignment budget");
  gc->add_option("--out", o.out, "Certificate path");
  gc->add_option("--no-sup-budget", o.no_sup_budget, "Kernel evaluations per falsifier seed");
  gc->add_option("--falsifier-seeds", o.falsifier_seeds, "Number of falsifier seeds");

  auto* gs = app.add_subcommand("gap-search", "Search a family's instances for a gap instance");
  common(gs, "Family file");
  gs->add_option("--gamma", o.gamma, "Completeness threshold (p/q)")->required();
  gs->add_option("--beta", o.beta, "Soundness threshold (p/q)")->required();
  gs->add_option("--budget", o.budget, "Instance evaluations");
  gs->add_option("--n-min", o.n_min, "Smallest variable count (default k)");
  gs->add_option("--n-max", o.n_max, "Largest variable count");
  gs->add_option("--max-constraints", o.max_constraints, "Largest constraint count");
  gs->add_option("--mode", o.mode, "exhaustive or random");
  gs->add_flag("--up-to-renaming", o.up_to_renaming, "Skip instances that are variable renamings of earlier ones");
  gs->add_flag("--maximize-gap", o.maximize_gap, "Keep the largest lp - csp gap instead of the first hit");
  gs->add_option("--out", o.out, "Certificate path");
  gs->add_option("--no-sup-budget", o.no_sup_budget, "Kernel evaluations per falsifier seed");
  gs->add_option("--falsifier-seeds", o.falsifier_seeds, "Number of falsifier seeds");

  auto* vc = app.add_subcommand("verify-cert", "Re-verify a gap certificate from scratch");
  common(vc, "Certificate file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*fs) return family_stats(o);
    if (*ls) return lp_solve(o);
    if (*gc) return gap_check(o);
    if (*gs) return gap_search(o);
    if (*vc) return verify_cert(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
