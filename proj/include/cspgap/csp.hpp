#pragma once
// Predicate families, weighted instances and assignments, with exact CSP
// values and the brute-force optimum.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "cspgap/error.hpp"
#include "cspgap/rational.hpp"

namespace cspgap {

/// Worker count for parallel enumeration: CSPGAP_THREADS if set, else hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("CSPGAP_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// q^e, or nullopt if it does not fit in 63 bits.
inline std::optional<std::uint64_t> checked_pow(std::uint64_t q, std::uint64_t e) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < e; ++i) {
    if (r > (std::uint64_t{1} << 62) / q) return std::nullopt;
    r *= q;
  }
  return r;
}

// Tuples in [q]^k are indexed lexicographically, first coordinate most significant.

inline std::vector<int> decode_tuple(std::size_t index, int q, int k) {
  std::vector<int> t(static_cast<std::size_t>(k));
  for (int l = k - 1; l >= 0; --l) {
    t[static_cast<std::size_t>(l)] = static_cast<int>(index % static_cast<std::size_t>(q));
    index /= static_cast<std::size_t>(q);
  }
  return t;
}

inline std::size_t encode_tuple(std::span<const int> t, int q) {
  std::size_t idx = 0;
  for (int v : t) idx = idx * static_cast<std::size_t>(q) + static_cast<std::size_t>(v);
  return idx;
}

/// Base-q digit string ("0".."9", then "a".."z"); q <= 36.
inline std::string tuple_string(std::span<const int> t) {
  static constexpr char digits[] = "0123456789abcdefghijklmnopqrstuvwxyz";
  std::string s;
  for (int v : t) s.push_back(digits[v]);
  return s;
}

inline std::vector<int> parse_tuple_string(std::string_view s, int q) {
  std::vector<int> t;
  for (char c : s) {
    int v = -1;
    if (c >= '0' && c <= '9') v = c - '0';
    else if (c >= 'a' && c <= 'z') v = c - 'a' + 10;
    if (v < 0 || v >= q) throw ParseError("bad tuple digit '" + std::string(1, c) + "' in \"" + std::string(s) + "\"");
    t.push_back(v);
  }
  return t;
}

struct Predicate {
  std::string name;
  std::vector<std::uint8_t> table;  // length q^k, entries 0/1

  bool operator()(std::size_t tuple_index) const { return table[tuple_index] != 0; }
  std::size_t support_size() const {
    return static_cast<std::size_t>(std::count(table.begin(), table.end(), std::uint8_t{1}));
  }
};

/// A finite family F of predicates [q]^k -> {0,1}. Immutable once built.
class PredicateFamily {
 public:
  PredicateFamily(int q, int k, std::vector<Predicate> predicates) : q_(q), k_(k), predicates_(std::move(predicates)) {
    if (q_ < 2) throw ValidationError("alphabet size q must be >= 2");
    if (q_ > 36) throw ValidationError("alphabet size q must be <= 36");
    if (k_ < 1) throw ValidationError("arity k must be >= 1");
    auto tuples = checked_pow(static_cast<std::uint64_t>(q_), static_cast<std::uint64_t>(k_));
    if (!tuples || *tuples > (std::uint64_t{1} << 24)) throw ValidationError("q^k too large");
    tuple_count_ = static_cast<std::size_t>(*tuples);
    if (predicates_.empty()) throw ValidationError("predicate family is empty");
    std::set<std::string> names;
    for (const auto& p : predicates_) {
      if (p.table.size() != tuple_count_)
        throw ValidationError("predicate '" + p.name + "' has table length " + std::to_string(p.table.size()) +
                              ", expected q^k = " + std::to_string(tuple_count_));
      for (auto bit : p.table)
        if (bit > 1) throw ValidationError("predicate '" + p.name + "' table entries must be 0 or 1");
      if (!names.insert(p.name).second) throw ValidationError("duplicate predicate name '" + p.name + "'");
    }
  }

  int q() const { return q_; }
  int k() const { return k_; }
  std::size_t size() const { return predicates_.size(); }
  std::size_t tuple_count() const { return tuple_count_; }
  const Predicate& operator[](std::size_t i) const { return predicates_[i]; }
  const std::vector<Predicate>& predicates() const { return predicates_; }

  std::optional<std::size_t> find(std::string_view name) const {
    for (std::size_t i = 0; i < predicates_.size(); ++i)
      if (predicates_[i].name == name) return i;
    return std::nullopt;
  }
  std::size_t index_of(std::string_view name) const {
    auto i = find(name);
    if (!i) throw ValidationError("unknown predicate '" + std::string(name) + "'");
    return *i;
  }

  /// Subfamily made of the predicates at the given indices (in the given order).
  PredicateFamily subfamily(std::span<const std::size_t> indices) const {
    std::vector<Predicate> sub;
    for (auto i : indices) sub.push_back(predicates_.at(i));
    return PredicateFamily(q_, k_, std::move(sub));
  }

  friend bool operator==(const PredicateFamily& a, const PredicateFamily& b) {
    if (a.q_ != b.q_ || a.k_ != b.k_ || a.predicates_.size() != b.predicates_.size()) return false;
    for (std::size_t i = 0; i < a.predicates_.size(); ++i)
      if (a.predicates_[i].name != b.predicates_[i].name || a.predicates_[i].table != b.predicates_[i].table)
        return false;
    return true;
  }

 private:
  int q_;
  int k_;
  std::size_t tuple_count_ = 0;
  std::vector<Predicate> predicates_;
};

using FamilyPtr = std::shared_ptr<const PredicateFamily>;

struct Constraint {
  std::size_t predicate;   // index into the family
  std::vector<int> vars;   // 0-based, pairwise distinct, length k
  std::int64_t weight = 1;

  friend auto operator<=>(const Constraint&, const Constraint&) = default;
};

struct Assignment {
  std::vector<int> values;  // length n, entries in [0, q)

  friend auto operator<=>(const Assignment&, const Assignment&) = default;
};

/// A weighted instance of Max-CSP(F) on n variables.
class Instance {
 public:
  Instance(FamilyPtr family, int n, std::vector<Constraint> constraints)
      : family_(std::move(family)), n_(n), constraints_(std::move(constraints)) {
    if (!family_) throw ValidationError("instance has no family");
    if (n_ < 1) throw ValidationError("variable count n must be >= 1");
    const auto k = static_cast<std::size_t>(family_->k());
    for (const auto& c : constraints_) {
      if (c.predicate >= family_->size()) throw ValidationError("constraint references unknown predicate");
      if (c.vars.size() != k) throw ValidationError("constraint arity differs from k");
      if (c.weight <= 0) throw ValidationError("constraint weights must be positive integers");
      for (std::size_t a = 0; a < k; ++a) {
        if (c.vars[a] < 0 || c.vars[a] >= n_)
          throw ValidationError("variable index " + std::to_string(c.vars[a] + 1) + " outside [1, " +
                                std::to_string(n_) + "]");
        for (std::size_t b = 0; b < a; ++b)
          if (c.vars[a] == c.vars[b])
            throw ValidationError("repeated variable " + std::to_string(c.vars[a] + 1) + " within a constraint");
      }
      total_weight_ += c.weight;
    }
    if (total_weight_ <= 0) throw ValidationError("instance has zero total weight");
  }

  const PredicateFamily& family() const { return *family_; }
  const FamilyPtr& family_ptr() const { return family_; }
  int n() const { return n_; }
  std::size_t m() const { return constraints_.size(); }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  std::int64_t total_weight() const { return total_weight_; }

  /// w_C / W as an exact rational.
  Rational weight_fraction(std::size_t c) const {
    return Rational(Integer(constraints_[c].weight), Integer(total_weight_));
  }

  /// Index into the predicate table of the values an assignment gives constraint c.
  std::size_t local_tuple(std::size_t c, std::span<const int> values) const {
    std::size_t idx = 0;
    for (int v : constraints_[c].vars)
      idx = idx * static_cast<std::size_t>(family_->q()) + static_cast<std::size_t>(values[static_cast<std::size_t>(v)]);
    return idx;
  }

  friend bool operator==(const Instance& a, const Instance& b) {
    return a.n_ == b.n_ && a.constraints_ == b.constraints_ && *a.family_ == *b.family_;
  }

 private:
  FamilyPtr family_;
  int n_;
  std::vector<Constraint> constraints_;
  std::int64_t total_weight_ = 0;
};

inline void check_assignment(const Instance& inst, const Assignment& a) {
  if (a.values.size() != static_cast<std::size_t>(inst.n()))
    throw ValidationError("assignment length " + std::to_string(a.values.size()) + " differs from n = " +
                          std::to_string(inst.n()));
  for (int v : a.values)
    if (v < 0 || v >= inst.family().q()) throw ValidationError("assignment value outside the alphabet");
}

/// Total weight of constraints satisfied by the given values; no validation.
inline std::int64_t satisfied_weight(const Instance& inst, std::span<const int> values) {
  std::int64_t w = 0;
  const auto& fam = inst.family();
  for (std::size_t c = 0; c < inst.m(); ++c) {
    const auto& con = inst.constraints()[c];
    if (fam[con.predicate](inst.local_tuple(c, values))) w += con.weight;
  }
  return w;
}

/// Fraction of constraint weight satisfied by a.
inline Rational csp_value(const Instance& inst, const Assignment& a) {
  check_assignment(inst, a);
  return Rational(Integer(satisfied_weight(inst, a.values)), Integer(inst.total_weight()));
}

struct CspOptimum {
  Rational value;
  Assignment witness;  // lexicographically smallest maximizer
};

inline constexpr std::uint64_t kDefaultBruteForceBudget = std::uint64_t{1} << 24;

/// Exhaustive maximum over all q^n assignments. The range is split across
/// worker threads; merging keeps the lowest-index maximizer, so the result
/// does not depend on scheduling.
inline CspOptimum brute_force_opt(const Instance& inst, std::uint64_t budget = kDefaultBruteForceBudget,
                                  unsigned threads = 0) {
  const int q = inst.family().q();
  const int n = inst.n();
  auto total = checked_pow(static_cast<std::uint64_t>(q), static_cast<std::uint64_t>(n));
  if (!total || *total > budget)
    throw BudgetExceeded("brute force needs q^n = " + std::to_string(q) + "^" + std::to_string(n) +
                         (total ? " = " + std::to_string(*total) : std::string{}) + " assignments, budget is " +
                         std::to_string(budget));
  if (threads == 0) threads = worker_count();
  // Small spaces are not worth a thread.
  if (*total < 4096) threads = 1;
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, *total));

  struct Best {
    std::int64_t weight = -1;
    std::uint64_t index = 0;
  };
  auto scan = [&](std::uint64_t begin, std::uint64_t end) {
    Best best;
    std::vector<int> values(static_cast<std::size_t>(n));
    std::uint64_t rest = begin;
    for (int i = n - 1; i >= 0; --i) {
      values[static_cast<std::size_t>(i)] = static_cast<int>(rest % static_cast<std::uint64_t>(q));
      rest /= static_cast<std::uint64_t>(q);
    }
    for (std::uint64_t t = begin; t < end; ++t) {
      std::int64_t w = satisfied_weight(inst, values);
      if (w > best.weight) best = {w, t};
      for (int i = n - 1; i >= 0; --i) {
        auto& v = values[static_cast<std::size_t>(i)];
        if (++v < q) break;
        v = 0;
      }
    }
    return best;
  };

  std::vector<Best> partial(threads);
  if (threads == 1) {
    partial[0] = scan(0, *total);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (*total + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      std::uint64_t b = std::min<std::uint64_t>(*total, chunk * t);
      std::uint64_t e = std::min<std::uint64_t>(*total, b + chunk);
      pool.emplace_back([&, t, b, e] { partial[t] = scan(b, e); });
    }
    for (auto& th : pool) th.join();
  }
  Best best;
  for (const auto& p : partial)
    if (p.weight > best.weight) best = p;  // chunks are in index order, so ties keep the earlier one

  Assignment witness{std::vector<int>(static_cast<std::size_t>(n))};
  std::uint64_t rest = best.index;
  for (int i = n - 1; i >= 0; --i) {
    witness.values[static_cast<std::size_t>(i)] = static_cast<int>(rest % static_cast<std::uint64_t>(q));
    rest /= static_cast<std::uint64_t>(q);
  }
  return {Rational(Integer(best.weight), Integer(inst.total_weight())), std::move(witness)};
}

}  // namespace cspgap
