#pragma once
// JSON files: predicate families, instances and gap certificates.
//
// Family:   {"q": 2, "k": 2, "predicates": [{"name": "cut", "table": [0,1,1,0]}]}
// Instance: {"family": "cut.json" | {...}, "n": 5,
//            "constraints": [{"f": "cut", "vars": [1, 2], "w": 1}]}
// Variables are 1-based in files and 0-based in memory. Rationals are "p/q".

#include <openssl/evp.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cspgap/gap_search.hpp"
#include "cspgap/version.hpp"

namespace cspgap::io {

using nlohmann::json;

namespace detail {

inline std::string line_position(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

template <class T>
T field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(where + ": missing \"" + key + "\"");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ParseError(where + ": \"" + key + "\" has the wrong type");
  }
}

inline const json& member(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(where + ": missing \"" + key + "\"");
  return *it;
}

inline Rational rational_field(const json& j, const char* key, const std::string& where) {
  auto s = field<std::string>(j, key, where);
  try {
    return parse_rational(s);
  } catch (const Error& e) {
    throw ParseError(where + ": \"" + key + "\": " + e.what());
  }
}

inline Rational rational_value(const json& j, const std::string& where) {
  if (!j.is_string()) throw ParseError(where + ": expected a \"p/q\" string");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const Error& e) {
    throw ParseError(where + ": " + e.what());
  }
}

}  // namespace detail

inline json parse_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    if (auto p = msg.find("syntax error"); p != std::string::npos) msg = msg.substr(p);
    throw ParseError(source + ": " + detail::line_position(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + msg);
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

/// Stable rendering: keys are sorted by nlohmann's std::map-backed objects.
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Families and instances

inline json family_to_json(const PredicateFamily& fam) {
  json preds = json::array();
  for (const auto& p : fam.predicates()) {
    json table = json::array();
    for (auto b : p.table) table.push_back(static_cast<int>(b));
    preds.push_back({{"name", p.name}, {"table", table}});
  }
  return {{"q", fam.q()}, {"k", fam.k()}, {"predicates", preds}};
}

inline FamilyPtr family_from_json(const json& j, const std::string& where = "family") {
  const int q = detail::field<int>(j, "q", where);
  const int k = detail::field<int>(j, "k", where);
  const auto& preds = detail::member(j, "predicates", where);
  if (!preds.is_array()) throw ParseError(where + ": \"predicates\" must be an array");
  std::vector<Predicate> out;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const std::string pw = where + ".predicates[" + std::to_string(i) + "]";
    Predicate p;
    p.name = detail::field<std::string>(preds[i], "name", pw);
    const auto& table = detail::member(preds[i], "table", pw);
    if (!table.is_array()) throw ParseError(pw + ": \"table\" must be an array of 0/1");
    for (const auto& v : table) {
      if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1))
        throw ParseError(pw + ": table entries must be 0 or 1");
      p.table.push_back(static_cast<std::uint8_t>(v.get<int>()));
    }
    out.push_back(std::move(p));
  }
  try {
    return std::make_shared<const PredicateFamily>(q, k, std::move(out));
  } catch (const ValidationError& e) {
    throw ParseError(where + ": " + e.what());
  }
}

inline FamilyPtr load_family(const std::filesystem::path& path) {
  return family_from_json(parse_text(read_file(path), path.string()), path.string());
}

inline json instance_to_json(const Instance& inst) {
  json cs = json::array();
  for (const auto& c : inst.constraints()) {
    json vars = json::array();
    for (int v : c.vars) vars.push_back(v + 1);
    cs.push_back({{"f", inst.family()[c.predicate].name}, {"vars", vars}, {"w", c.weight}});
  }
  return {{"family", family_to_json(inst.family())}, {"n", inst.n()}, {"constraints", cs}};
}

/// `base` resolves a family given as a relative path. Zero-weight constraints
/// are dropped with a warning on `warn`.
inline Instance instance_from_json(const json& j, const std::filesystem::path& base = {},
                                   std::ostream* warn = &std::cerr, const std::string& where = "instance") {
  const auto& fj = detail::member(j, "family", where);
  FamilyPtr fam;
  if (fj.is_string()) {
    std::filesystem::path p = fj.get<std::string>();
    if (p.is_relative() && !base.empty()) p = base / p;
    fam = load_family(p);
  } else {
    fam = family_from_json(fj, where + ".family");
  }
  const int n = detail::field<int>(j, "n", where);
  const auto& cj = detail::member(j, "constraints", where);
  if (!cj.is_array()) throw ParseError(where + ": \"constraints\" must be an array");
  std::vector<Constraint> cs;
  for (std::size_t i = 0; i < cj.size(); ++i) {
    const std::string cw = where + ".constraints[" + std::to_string(i) + "]";
    const auto name = detail::field<std::string>(cj[i], "f", cw);
    auto idx = fam->find(name);
    if (!idx) throw ParseError(cw + ": unknown predicate \"" + name + "\"");
    auto vars = detail::field<std::vector<int>>(cj[i], "vars", cw);
    for (auto& v : vars) --v;
    std::int64_t w = 1;
    if (cj[i].contains("w")) w = detail::field<std::int64_t>(cj[i], "w", cw);
    if (w == 0) {
      if (warn) *warn << "warning: " << cw << " has weight 0 and is dropped\n";
      continue;
    }
    cs.push_back({*idx, std::move(vars), w});
  }
  try {
    return Instance(std::move(fam), n, std::move(cs));
  } catch (const ValidationError& e) {
    throw ParseError(where + ": " + e.what());
  }
}

inline Instance load_instance(const std::filesystem::path& path, std::ostream* warn = &std::cerr) {
  return instance_from_json(parse_text(read_file(path), path.string()), path.parent_path(), warn, path.string());
}

// ---------------------------------------------------------------------------
// Certificates

inline std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) throw Error("SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

/// Digest over the compact rendering of everything except "digest" itself.
inline std::string certificate_digest(json j) {
  j.erase("digest");
  return sha256_hex(j.dump());
}

inline json distribution_to_json(const PairDistribution& d) {
  json atoms = json::array();
  const auto& fam = *d.family;
  for (std::size_t f = 0; f < fam.size(); ++f)
    for (std::size_t a = 0; a < fam.tuple_count(); ++a)
      if (!d.at(f, a).is_zero())
        atoms.push_back({{"f", fam[f].name}, {"a", tuple_string(decode_tuple(a, fam.q(), fam.k()))}, {"p", to_string(d.at(f, a))}});
  return atoms;
}

inline PairDistribution distribution_from_json(const json& j, const FamilyPtr& fam, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array of atoms");
  PairDistribution d(fam);
  std::vector<bool> seen(d.mass.size(), false);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string aw = where + "[" + std::to_string(i) + "]";
    auto f = fam->find(detail::field<std::string>(j[i], "f", aw));
    if (!f) throw ParseError(aw + ": unknown predicate");
    std::vector<int> t;
    try {
      t = parse_tuple_string(detail::field<std::string>(j[i], "a", aw), fam->q());
    } catch (const Error& e) {
      throw ParseError(aw + ": " + e.what());
    }
    if (t.size() != static_cast<std::size_t>(fam->k())) throw ParseError(aw + ": tuple has the wrong length");
    const std::size_t idx = *f * fam->tuple_count() + encode_tuple(t, fam->q());
    if (seen[idx]) throw ParseError(aw + ": duplicate atom");
    seen[idx] = true;
    d.mass[idx] = detail::rational_field(j[i], "p", aw);
  }
  return d;
}

inline json certificate_to_json(const GapCertificate& c) {
  const auto& fam = c.instance.family();
  json local = json::array();
  for (const auto& y : c.solution.local) {
    json m = json::object();
    for (std::size_t a = 0; a < y.size(); ++a)
      if (!y[a].is_zero()) m[tuple_string(decode_tuple(a, fam.q(), fam.k()))] = to_string(y[a]);
    local.push_back(m);
  }
  json marg = json::array();
  for (const auto& x : c.solution.marginals) {
    json row = json::array();
    for (const auto& v : x) row.push_back(to_string(v));
    marg.push_back(row);
  }
  json mu = json::array();
  for (std::size_t f = 0; f < c.marginals.predicates; ++f)
    for (std::size_t l = 0; l < c.marginals.k; ++l)
      for (std::size_t s = 0; s < c.marginals.q; ++s)
        mu.push_back({{"f", fam[f].name}, {"l", l + 1}, {"s", s}, {"p", to_string(c.marginals.at(f, l, s))}});
  json kernel = json::array();
  for (const auto& row : c.no_sup_kernel.rows) {
    json r = json::array();
    for (const auto& v : row) r.push_back(to_string(v));
    kernel.push_back(r);
  }
  json j = {
      {"schema_version", kCertificateSchemaVersion},
      {"toolkit_version", c.toolkit_version},
      {"seed", c.seed},
      {"gamma", to_string(c.gamma)},
      {"beta", to_string(c.beta)},
      {"instance", instance_to_json(c.instance)},
      {"lp_value", to_string(c.lp_value)},
      {"csp_value", to_string(c.csp_value)},
      {"csp_witness", tuple_string(c.csp_witness.values)},
      {"brute_force_budget", c.brute_force_budget},
      {"lp_solution", {{"local", local}, {"marginals", marg}}},
      {"d_yes", distribution_to_json(c.yes)},
      {"d_no", distribution_to_json(c.no)},
      {"marginal_vector", mu},
      {"no_sup", {{"bound", to_string(c.no_sup_bound)}, {"kernel", kernel}, {"budget", c.no_sup_budget}, {"seed", c.no_sup_seed}}},
  };
  j["digest"] = certificate_digest(j);
  return j;
}

inline GapCertificate certificate_from_json(const json& j) {
  const std::string w = "certificate";
  if (detail::field<int>(j, "schema_version", w) != kCertificateSchemaVersion)
    throw ParseError("unsupported certificate schema_version");
  Instance inst = instance_from_json(detail::member(j, "instance", w), {}, nullptr, w + ".instance");
  const auto fam = inst.family_ptr();
  const int q = fam->q();

  std::vector<int> witness;
  try {
    witness = parse_tuple_string(detail::field<std::string>(j, "csp_witness", w), q);
  } catch (const Error& e) {
    throw ParseError(w + ".csp_witness: " + e.what());
  }

  const auto& sol = detail::member(j, "lp_solution", w);
  LocalDistributionSolution s;
  const auto& local = detail::member(sol, "local", w + ".lp_solution");
  if (!local.is_array()) throw ParseError(w + ".lp_solution.local must be an array");
  for (std::size_t c = 0; c < local.size(); ++c) {
    const std::string lw = w + ".lp_solution.local[" + std::to_string(c) + "]";
    if (!local[c].is_object()) throw ParseError(lw + ": expected an object");
    std::vector<Rational> y(fam->tuple_count());
    for (const auto& [key, val] : local[c].items()) {
      std::vector<int> t;
      try {
        t = parse_tuple_string(key, q);
      } catch (const Error& e) {
        throw ParseError(lw + ": " + e.what());
      }
      if (t.size() != static_cast<std::size_t>(fam->k())) throw ParseError(lw + ": tuple has the wrong length");
      y[encode_tuple(t, q)] = detail::rational_value(val, lw + "." + key);
    }
    s.local.push_back(std::move(y));
  }
  const auto& marg = detail::member(sol, "marginals", w + ".lp_solution");
  if (!marg.is_array()) throw ParseError(w + ".lp_solution.marginals must be an array");
  for (std::size_t i = 0; i < marg.size(); ++i) {
    const std::string mw = w + ".lp_solution.marginals[" + std::to_string(i) + "]";
    if (!marg[i].is_array()) throw ParseError(mw + ": expected an array");
    std::vector<Rational> x;
    for (const auto& v : marg[i]) x.push_back(detail::rational_value(v, mw));
    s.marginals.push_back(std::move(x));
  }
  s.value = detail::rational_field(j, "lp_value", w);

  MarginalVector mu(fam->size(), static_cast<std::size_t>(fam->k()), static_cast<std::size_t>(q));
  const auto& mj = detail::member(j, "marginal_vector", w);
  if (!mj.is_array() || mj.size() != mu.entries.size())
    throw ParseError(w + ".marginal_vector must list every (f, l, s) entry");
  std::vector<bool> seen(mu.entries.size(), false);
  for (std::size_t i = 0; i < mj.size(); ++i) {
    const std::string ew = w + ".marginal_vector[" + std::to_string(i) + "]";
    auto f = fam->find(detail::field<std::string>(mj[i], "f", ew));
    const auto l = detail::field<std::int64_t>(mj[i], "l", ew);
    const auto sym = detail::field<std::int64_t>(mj[i], "s", ew);
    if (!f || l < 1 || l > fam->k() || sym < 0 || sym >= q) throw ParseError(ew + ": index out of range");
    const std::size_t idx = (*f * mu.k + static_cast<std::size_t>(l - 1)) * mu.q + static_cast<std::size_t>(sym);
    if (seen[idx]) throw ParseError(ew + ": duplicate entry");
    seen[idx] = true;
    mu.entries[idx] = detail::rational_field(mj[i], "p", ew);
  }

  const auto& ns = detail::member(j, "no_sup", w);
  SymbolKernel kernel;
  const auto& kj = detail::member(ns, "kernel", w + ".no_sup");
  if (!kj.is_array()) throw ParseError(w + ".no_sup.kernel must be an array");
  for (const auto& row : kj) {
    if (!row.is_array()) throw ParseError(w + ".no_sup.kernel rows must be arrays");
    kernel.rows.emplace_back();
    for (const auto& v : row) kernel.rows.back().push_back(detail::rational_value(v, w + ".no_sup.kernel"));
  }

  GapCertificate c{std::move(inst),
                   detail::rational_field(j, "gamma", w),
                   detail::rational_field(j, "beta", w),
                   s.value,
                   detail::rational_field(j, "csp_value", w),
                   Assignment{std::move(witness)},
                   std::move(s),
                   distribution_from_json(detail::member(j, "d_yes", w), fam, w + ".d_yes"),
                   distribution_from_json(detail::member(j, "d_no", w), fam, w + ".d_no"),
                   std::move(mu),
                   detail::rational_field(ns, "bound", w + ".no_sup"),
                   std::move(kernel),
                   detail::field<std::uint64_t>(ns, "budget", w + ".no_sup"),
                   detail::field<std::uint64_t>(ns, "seed", w + ".no_sup"),
                   detail::field<std::uint64_t>(j, "brute_force_budget", w),
                   detail::field<std::uint64_t>(j, "seed", w),
                   detail::field<std::string>(j, "toolkit_version", w)};
  return c;
}

/// Semantic verification first, so a tampered claim is reported by name;
/// the digest then catches edits to fields with no semantic check.
inline VerifyReport verify_certificate_json(const json& j) {
  GapCertificate c = certificate_from_json(j);
  auto report = verify_certificate(c);
  if (!report.ok()) return report;
  if (!j.contains("digest") || !j["digest"].is_string() || j["digest"].get<std::string>() != certificate_digest(j))
    return {VerifyOutcome::fail, "digest mismatch"};
  return report;
}

}  // namespace cspgap::io
