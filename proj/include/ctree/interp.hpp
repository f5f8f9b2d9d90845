#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctree/deftable.hpp"
#include "ctree/equiv.hpp"
#include "ctree/lts.hpp"

namespace ctree {

class UnhandledEvent : public std::runtime_error {
 public:
  explicit UnhandledEvent(const Value& e) : std::runtime_error("no handler for event " + e.str()), event_(e) {}
  const Value& event() const { return event_; }

 private:
  Value event_;
};

/// An event handler: `impl` is a Cont taking an event to a tree that returns
/// one of the event's answers.
struct Handler {
  enum class Kind { Pure, Trigger, General };
  Value impl;
  Kind kind = Kind::General;

  bool simple() const { return kind != Kind::General; }

  static Handler identity();                    // e -> trigger e
  static Handler step_trigger();                // e -> Step (trigger e); not simple
  /// e -> Ret a for each (e a) row.
  static Handler pure(std::vector<std::pair<Value, Value>> rows);
  /// e -> trigger f for each (e f) row; f must have e's answer domain.
  static Handler rename(std::vector<std::pair<Value, Value>> rows);
  /// e -> T for each (e T) row.
  static Handler table(std::vector<std::pair<Value, Value>> rows);
};

/// A stateful handler: `impl` is a Cont taking (s e) to a tree returning (s' a).
struct StateHandler {
  Value impl;
  bool simple = true;

  /// Memory over events (ev rd (x) DOM) and (ev wr (x v) (())); the state is a
  /// sorted list ((x v) ...) and unset variables read as 0.
  static StateHandler memory();
  /// Runs a plain handler and leaves the state alone.
  static StateHandler lift(const Handler& h);
};

Value interp(const Handler& h, Value t);
/// Returns (s r) at every leaf.
Value interp_state(const StateHandler& h, Value t, Value s0);

// Store helpers for the memory handler.
Value store_get(const Value& store, const Value& x);
Value store_set(const Value& store, const Value& x, const Value& v);

/// `chooser` is a Cont from (b n) to a tree returning an index below n, with
/// b = 1 for stepping branches and 0 for delayed ones.
Value refine(Value chooser, Value t);

/// A pure branch selector: Cont from (b m) to Ret i with 0 <= i <= m, asked
/// about branches of width m + 1.
namespace pick {
Value first();
Value last();
Value fixed(std::int64_t i);  // min(i, m)
}  // namespace pick

Value refine_cst(Value pick, Value t);

/// A stateful selector: Cont from (s b m) to Ret (s' i) with 0 <= i <= m.
namespace spick {
/// Counter state; picks counter mod (m + 1) and advances modulo 6 on every
/// branch of width at least 2.
Value round_robin();
/// Ignores the state and defers to a pure selector.
Value constant(Value pick);
}  // namespace spick

/// Returns (s r) at every leaf; stepping choices leave a Step.
Value refine_state(Value spick, Value t, Value s0);

struct RunResult {
  enum class Outcome { Returned, Stuck, OutOfSteps };
  std::vector<Label> trace;
  Outcome outcome = Outcome::Stuck;
  Value value;  // Returned only

  std::string outcome_name() const;
  std::string to_json() const;
};

/// Picks uniformly among the transitions at every step. Deterministic in
/// (t, seed); exhausting the closure budget counts as running out of steps.
RunResult run_random(const DefTable& defs, const Value& t, std::uint64_t seed, std::size_t max_steps,
                     const Budget& b = {});

// Deterministic interaction trees:
//   (iret V) | (ivis EVENT CONT) | (later T), or a call unfolding to one.
Value iret(Value v);
Value ivis(Value e, Value k);
Value later(Value t);
/// Finite, possibly cyclic itree from a node table with rows
///   (ret V) | (vis EVENT (SUCC...)) | (later SUCC)
Value igraph(Value nodes, std::int64_t root);
/// The event used by internalize; answers 0..n-1, n >= 1.
Value choose_event(std::int64_t n);

Value inject(Value it);
Value internalize(Value t);
Value embed(Value it);

/// Equivalence up to finite Later padding, decided as strong bisimilarity of
/// the LTS in which Later chains are collapsed and Later cycles become tau
/// self-loops.
Verdict check_eutt(const DefTable& defs, const Value& it, const Value& iu, const Budget& b);

}  // namespace ctree
