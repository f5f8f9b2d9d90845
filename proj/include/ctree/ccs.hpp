#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctree/equiv.hpp"
#include "ctree/lts.hpp"
#include "ctree/value.hpp"

namespace ctree::ccs {

// Processes are Values:
//   (nil) | (pre ACTION P) | (plus P Q) | (par P Q) | (new c P) | (bang P)
// and actions are `tau`, a channel symbol c, or (co c).

Value nil();
Value prefix(Value action, Value p);
Value plus(Value p, Value q);
Value par(Value p, Value q);
Value restrict(std::string_view channel, Value p);
Value bang(Value p);

Value tau_action();
Value name(std::string_view channel);
Value coname(std::string_view channel);
/// c <-> (co c); tau is its own complement.
Value complement(const Value& action);
bool is_tau(const Value& action);

class SyntaxError : public ParseError {
 public:
  using ParseError::ParseError;
};

/// Grammar, loosest first:
///   P ::= S ('+' S)*        S ::= A ('|' A)*
///   A ::= '0' | L '.' A | '!' A | 'new' c 'in' P | '(' P ')'
///   L ::= 'tau' | c | '\'' c
/// `new` extends as far to the right as possible.
Value parse(std::string_view text);
std::string print(const Value& p);

/// Channels mentioned anywhere in p, sorted.
std::vector<std::string> channels(const Value& p);

/// Unit handling. Collapse identifies P | 0, 0 | P with P and a restricted
/// 0 with 0 (operationally on the syntax, denotationally on delayed branches
/// of width 0), which keeps replicated terminating processes finite.
enum class Mode { Verbatim, Collapse };

/// Operational steps, sorted and duplicate-free. Replication uses the two
/// shortest derivations of the rule through P | !P: a single copy moves, or
/// two copies synchronize.
std::vector<std::pair<Value, Value>> op_transitions(const Value& p, Mode mode = Mode::Collapse);

/// The event emitted by an action.
Value act_event(const Value& action);
Label to_label(const Value& action);

Value denote(const Value& p, Mode mode = Mode::Collapse);

FiniteLTS op_lts(const std::vector<Value>& roots, const Budget& b, Mode mode = Mode::Collapse);
FiniteLTS den_lts(const std::vector<Value>& roots, const Budget& b, Mode mode = Mode::Collapse);

Verdict check_op_bisim(const Value& p, const Value& q, const Budget& b);
Verdict check_den_bisim(const Value& p, const Value& q, const Budget& b);
Verdict check_op_wbisim(const Value& p, const Value& q, const Budget& b);
Verdict check_den_wbisim(const Value& p, const Value& q, const Budget& b);

/// Number of constructors, counting 0.
std::size_t size(const Value& p);

/// Seeded random processes over the channels a, b, c (the first `alphabet`).
class ProcGen {
 public:
  explicit ProcGen(std::uint64_t seed, int alphabet = 3);
  /// Size drawn uniformly from 1..max_size.
  Value process(std::size_t max_size);
  Value process_of_size(std::size_t n);
  /// Size-preserving edit: commutes or reassociates a sum or parallel
  /// (bisimilar), or with probability 1/3 replaces one action (usually not).
  Value variant(const Value& p);
  Value action();
  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
  int alphabet_;
  std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(rng_() % n); }
};

}  // namespace ctree::ccs
