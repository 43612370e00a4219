#pragma once
// Deterministic streams of unit-weight instances.
//
// An instance is a nondecreasing sequence of "atoms" (predicate, ordered tuple
// of distinct variables); repeated atoms stand in for integer weights. The
// exhaustive stream walks n, then m, then sequences in lexicographic order.
// With up_to_renaming set it keeps only sequences that are lexicographically
// minimal under every permutation of the variables. Every prefix of such a
// sequence is minimal as well, so the walk prunes on prefixes.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "cspgap/csp.hpp"

namespace cspgap {

enum class StreamMode { exhaustive, random };

struct StreamSpec {
  FamilyPtr family;
  int n_min = 2;
  int n_max = 2;
  std::size_t max_constraints = 1;
  StreamMode mode = StreamMode::exhaustive;
  std::uint64_t seed = 0;
  bool up_to_renaming = false;
};

namespace detail {

// Atoms for a fixed n, ordered like Constraint (predicate first, then tuple).
struct AtomTable {
  std::vector<Constraint> atoms;
  std::vector<std::vector<std::uint32_t>> permuted;  // per permutation: atom -> image atom

  AtomTable(const PredicateFamily& fam, int n, bool with_permutations) {
    const int k = fam.k();
    std::vector<std::vector<int>> tuples;
    std::vector<int> t(static_cast<std::size_t>(k));
    const auto total = *checked_pow(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(k));
    for (std::uint64_t idx = 0; idx < total; ++idx) {
      std::uint64_t rest = idx;
      for (int l = k - 1; l >= 0; --l) {
        t[static_cast<std::size_t>(l)] = static_cast<int>(rest % static_cast<std::uint64_t>(n));
        rest /= static_cast<std::uint64_t>(n);
      }
      bool distinct = true;
      for (int a = 0; a < k && distinct; ++a)
        for (int b = 0; b < a; ++b)
          if (t[static_cast<std::size_t>(a)] == t[static_cast<std::size_t>(b)]) distinct = false;
      if (distinct) tuples.push_back(t);
    }
    for (std::size_t f = 0; f < fam.size(); ++f)
      for (const auto& tt : tuples) atoms.push_back({f, tt, 1});
    if (!with_permutations) return;
    if (n > 8) throw ValidationError("renaming-canonical enumeration supports n <= 8");
    const std::uint64_t nn = static_cast<std::uint64_t>(n);
    auto index_of = [&](const std::vector<int>& vars) {
      std::uint64_t code = 0;
      for (int v : vars) code = code * nn + static_cast<std::uint64_t>(v);
      return code;
    };
    std::vector<std::int64_t> lookup_by_code(fam.size() * total, -1);
    for (std::size_t i = 0; i < atoms.size(); ++i)
      lookup_by_code[atoms[i].predicate * total + index_of(atoms[i].vars)] =
          static_cast<std::int64_t>(i);
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    do {
      std::vector<std::uint32_t> map(atoms.size());
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        std::vector<int> img = atoms[i].vars;
        for (auto& v : img) v = perm[static_cast<std::size_t>(v)];
        map[i] = static_cast<std::uint32_t>(lookup_by_code[atoms[i].predicate * total + index_of(img)]);
      }
      permuted.push_back(std::move(map));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
};

}  // namespace detail

/// Lazily produced instance stream; identical specs give identical streams.
class InstanceStream {
 public:
  explicit InstanceStream(StreamSpec spec) : spec_(std::move(spec)), rng_(spec_.seed) {
    if (!spec_.family) throw ValidationError("stream has no family");
    if (spec_.n_min < spec_.family->k()) throw ValidationError("n_min must be >= k");
    if (spec_.n_max < spec_.n_min) throw ValidationError("n_max must be >= n_min");
    if (spec_.max_constraints < 1) throw ValidationError("max_constraints must be >= 1");
    n_ = spec_.n_min;
    m_ = 1;
  }

  std::optional<Instance> next() {
    if (spec_.mode == StreamMode::random) return next_random();
    return next_exhaustive();
  }

  /// Number of instances produced so far.
  std::uint64_t produced() const { return produced_; }

 private:
  std::optional<Instance> next_random() {
    if (tables_.empty())
      for (int n = spec_.n_min; n <= spec_.n_max; ++n) tables_.emplace_back(*spec_.family, n, false);
    std::uniform_int_distribution<int> pick_n(spec_.n_min, spec_.n_max);
    std::uniform_int_distribution<std::size_t> pick_m(1, spec_.max_constraints);
    const int n = pick_n(rng_);
    const std::size_t m = pick_m(rng_);
    const auto& atoms = tables_[static_cast<std::size_t>(n - spec_.n_min)].atoms;
    std::uniform_int_distribution<std::size_t> pick_atom(0, atoms.size() - 1);
    std::vector<std::size_t> seq(m);
    for (auto& s : seq) s = pick_atom(rng_);
    std::sort(seq.begin(), seq.end());
    std::vector<Constraint> cs;
    for (auto s : seq) cs.push_back(atoms[s]);
    ++produced_;
    return Instance(spec_.family, n, std::move(cs));
  }

  std::optional<Instance> next_exhaustive() {
    for (;;) {
      if (n_ > spec_.n_max) return std::nullopt;
      if (!table_ || table_n_ != n_) {
        table_.emplace(*spec_.family, n_, spec_.up_to_renaming);
        table_n_ = n_;
        restart_ = true;
      }
      if (advance()) {
        std::vector<Constraint> cs;
        for (auto s : seq_) cs.push_back(table_->atoms[s]);
        ++produced_;
        return Instance(spec_.family, n_, std::move(cs));
      }
      // Block (n, m) exhausted.
      if (++m_ > spec_.max_constraints) {
        m_ = 1;
        ++n_;
      }
      restart_ = true;
    }
  }

  // Is seq_[0..p] lexicographically minimal among its variable renamings?
  bool prefix_ok(std::size_t p) {
    if (!spec_.up_to_renaming) return true;
    const std::size_t len = p + 1;
    image_.resize(len);
    for (const auto& map : table_->permuted) {
      for (std::size_t i = 0; i < len; ++i) image_[i] = map[seq_[i]];
      std::sort(image_.begin(), image_.end());
      for (std::size_t i = 0; i < len; ++i) {
        if (image_[i] < seq_[i]) return false;
        if (image_[i] > seq_[i]) break;
      }
    }
    return true;
  }

  // Moves seq_ to the next admissible nondecreasing sequence of length m_.
  bool advance() {
    const std::size_t atoms = table_->atoms.size();
    std::size_t p;
    if (restart_) {
      restart_ = false;
      seq_.assign(m_, 0);
      p = 0;
    } else {
      p = m_ - 1;
      ++seq_[p];
    }
    for (;;) {
      if (seq_[p] >= atoms) {
        if (p == 0) return false;
        --p;
        ++seq_[p];
        continue;
      }
      if (!prefix_ok(p)) {
        ++seq_[p];
        continue;
      }
      if (++p == m_) return true;
      seq_[p] = seq_[p - 1];
    }
  }

  StreamSpec spec_;
  std::mt19937_64 rng_;
  int n_ = 0;
  std::size_t m_ = 1;
  std::optional<detail::AtomTable> table_;
  int table_n_ = 0;
  std::vector<detail::AtomTable> tables_;
  std::vector<std::size_t> seq_;
  std::vector<std::size_t> image_;
  bool restart_ = true;
  std::uint64_t produced_ = 0;
};

}  // namespace cspgap
