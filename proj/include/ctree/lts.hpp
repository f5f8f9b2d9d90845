#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ctree/deftable.hpp"
#include "ctree/verdict.hpp"

namespace ctree {

struct Budget {
  std::size_t max_states = 100'000;
  std::size_t max_closure_depth = 10'000;  // delayed nodes visited per closure
};

struct ClosureResult {
  std::vector<Value> heads;  // unfolded Ret/Vis/BrS nodes, in discovery order
  bool divergence_detected = false;
  bool budget_exhausted = false;
};

/// Everything reachable from `t` through delayed branches.
ClosureResult brd_closure(const DefTable& defs, const Value& t, const Budget& b);

struct Move {
  Label label;
  Value target;  // unfolded
  friend bool operator==(const Move&, const Move&) = default;
};

struct Moves {
  std::vector<Move> moves;  // sorted by (label, target), duplicate-free
  bool partial = false;     // closure budget exhausted; moves incomplete
  bool divergent = false;   // some delayed cycle was pruned
};

/// The induced transitions of `t`: tau to each child of a reachable stepping
/// branch, one observation per answer of a reachable Vis, and a value
/// transition to the stuck tree from a reachable Ret.
Moves transitions(const DefTable& defs, const Value& t, const Budget& b);

/// Holds iff `t` has no transition; Fails with the first transition found.
Verdict is_stuck(const DefTable& defs, const Value& t, const Budget& b);

/// Target of every value transition.
Value stuck_state();

struct Transition {
  std::uint32_t src;
  std::uint32_t label;
  std::uint32_t dst;
  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Explicit fragment of a transition system. State ids and label ids are
/// assigned in breadth-first discovery order, which depends only on the
/// roots and the successor function.
class FiniteLTS {
 public:
  std::vector<Value> states;
  std::vector<Label> labels;
  std::vector<Transition> transitions;  // grouped by src, sorted by (label value, dst key)
  std::vector<std::size_t> roots;
  std::vector<std::uint8_t> expanded;   // 0 marks a frontier state
  std::vector<std::uint8_t> divergent;
  bool partial = false;

  std::size_t initial() const { return roots.at(0); }
  std::size_t size() const { return states.size(); }
  std::span<const Transition> out(std::size_t s) const;
  std::optional<std::size_t> find(const Value& key) const;
  std::optional<std::size_t> find_label(const Label& l) const;
  bool is_frontier(std::size_t s) const { return !expanded[s]; }

  // Used by builders.
  std::size_t intern_state(const Value& key);
  std::uint32_t intern_label(const Label& l);
  void finish();  // builds the out() index

 private:
  std::vector<std::size_t> out_begin_;
  std::unordered_map<Value, std::size_t, ValueHash> state_index_;
  std::unordered_map<Value, std::uint32_t, ValueHash> label_index_;
};

using Successors = std::function<Moves(const Value&)>;

/// Breadth-first exploration from `roots`; at most `max_states` states are
/// expanded, the rest of the discovered states form the frontier.
FiniteLTS explore(const std::vector<Value>& roots, const Successors& succ, std::size_t max_states);

FiniteLTS extract_lts(const DefTable& defs, const Value& t, const Budget& b);
FiniteLTS extract_lts(const DefTable& defs, const std::vector<Value>& roots, const Budget& b);

/// States reachable by tau* then `l` then tau*; tau* alone when `l` is tau.
std::vector<std::size_t> weak_transitions(const FiniteLTS& lts, std::size_t s, const Label& l);

/// Same states, weak transitions. A state is a frontier state when any state
/// touched by one of its weak moves is.
FiniteLTS saturate(const FiniteLTS& lts);

std::string to_dot(const FiniteLTS& lts);
std::string to_json(const FiniteLTS& lts);

}  // namespace ctree
