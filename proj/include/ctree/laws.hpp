#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ctree/deftable.hpp"
#include "ctree/lts.hpp"

namespace ctree {

struct GenConfig {
  int max_depth = 5;
  int max_width = 3;
  int max_nodes = 16;
  int ret_values = 3;  // Ret leaves carry 0..ret_values-1 unless a pool is given
  int back_edge_percent = 15;
};

/// Random finite-state trees, built as `graph` node tables so that cycles are
/// cheap and every generated tree has a finite LTS.
class TreeGen {
 public:
  explicit TreeGen(std::uint64_t seed, GenConfig cfg = {});

  Value tree();
  Value tree(const std::vector<Value>& returns);
  /// One of the three events a, b, c with 1, 2 and 3 answers.
  Value event();
  /// A tree that is stuck by construction.
  Value stuck_tree();
  /// Applies `steps` sound rewrites; the result is strongly bisimilar to `t`.
  Value rewrite(const Value& t, int steps = 2);

  /// Random finite-state interaction tree (an `igraph`) over the same events.
  Value itree();
  /// Inserts Later nodes at random places; the result is eutt to `it`.
  Value pad_laters(const Value& it, int count = 2);
  /// Replaces one reachable return value by 99; nullopt when `it` has none.
  std::optional<Value> mutate_return(const Value& it);

  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : rng_() % n; }
  bool chance(int percent) { return static_cast<int>(below(100)) < percent; }
  std::mt19937_64& rng() { return rng_; }
  const GenConfig& config() const { return cfg_; }

 private:
  std::mt19937_64 rng_;
  GenConfig cfg_;
};

struct LawReport {
  std::string suite;
  std::string name;
  std::string relation;      // "equ", "sbisim" or "wbisim"
  std::size_t checked = 0;   // instances whose premise held (every instance for equations)
  std::size_t fails = 0;
  std::size_t unknown = 0;
  std::size_t vacuous = 0;   // implication instances with a false premise
  std::vector<std::string> counterexamples;

  bool ok() const { return fails == 0; }
};

std::vector<std::string> law_suites();  // "elementary", "monadic", "iter"
std::vector<std::string> law_names(const std::string& suite);

/// Runs one law on `instances` random inputs. Deterministic in (seed, name).
LawReport check_law(const std::string& suite, const std::string& name, std::uint64_t seed, std::size_t instances,
                    const Budget& b);

/// Runs a whole suite, spreading laws over `jobs` threads. Results are in
/// law order and do not depend on `jobs`.
std::vector<LawReport> check_suite(const std::string& suite, std::uint64_t seed, std::size_t instances,
                                   const Budget& b, unsigned jobs = 1);

/// Checks that the one-step moves of bind(t, k) are exactly those obtained by
/// running t's non-value moves under the bind, plus the moves of k v for every
/// value v that t can return. Targets are compared up to equ.
Verdict check_bind_transitions(const DefTable& defs, const Value& t, const Value& k, const Budget& b);

}  // namespace ctree
