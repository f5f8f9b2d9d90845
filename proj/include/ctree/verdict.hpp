#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ctree/value.hpp"

namespace ctree {

/// Transition label: tau, an observed event with its answer, or a returned value.
class Label {
 public:
  enum class Kind { Tau, Obs, Val };

  Label();  // tau
  static Label tau() { return Label(); }
  static Label obs(Value event, Value answer);
  static Label val(Value v);
  static Label from_value(const Value& v);

  Kind kind() const;
  bool is_tau() const { return kind() == Kind::Tau; }
  bool is_obs() const { return kind() == Kind::Obs; }
  bool is_val() const { return kind() == Kind::Val; }
  const Value& event() const;   // Obs
  const Value& answer() const;  // Obs
  const Value& value() const;   // Val

  /// `tau`, `(obs EVENT ANSWER)`, or `(val V)`.
  const Value& repr() const { return v_; }
  std::string str() const { return v_.str(); }

  friend bool operator==(const Label&, const Label&) = default;
  friend auto operator<=>(const Label& a, const Label& b) { return a.v_ <=> b.v_; }

 private:
  explicit Label(Value v) : v_(std::move(v)) {}
  Value v_;
};

enum class Side { Left, Right };

/// One attacker move in a refutation: from the pair (left, right) the attacker
/// plays `label` on `side` to `target`. Every defender reply is listed, and
/// each leads to another node of the strategy that is again won.
struct StrategyNode {
  std::size_t left = 0;
  std::size_t right = 0;
  Side side = Side::Left;
  std::size_t label = 0;  // index into the LTS label table
  std::size_t target = 0;
  struct Reply {
    std::size_t label;
    std::size_t state;
    std::size_t next;  // index into Witness::strategy
  };
  std::vector<Reply> replies;
};

/// Distinguishing experiment attached to a failed check.
struct Witness {
  std::string kind;           // "game", "structural", "trace", "stuck"
  std::vector<Label> trace;   // principal line of play
  std::vector<Side> sides;    // side of each trace element, where meaningful
  std::vector<StrategyNode> strategy;  // game witnesses only; node 0 is the root
  std::vector<Label> labels;  // label table referenced by strategy
  std::string note;

  std::string to_json() const;
};

class Verdict {
 public:
  enum class Status { Holds, Fails, Unknown };

  static Verdict holds() { return Verdict(Status::Holds); }
  static Verdict fails(Witness w);
  static Verdict unknown(std::string reason);

  Status status() const { return status_; }
  bool is_holds() const { return status_ == Status::Holds; }
  bool is_fails() const { return status_ == Status::Fails; }
  bool is_unknown() const { return status_ == Status::Unknown; }
  const Witness& witness() const { return witness_; }
  const std::string& reason() const { return reason_; }

  std::string name() const;
  std::string to_json() const;

 private:
  explicit Verdict(Status s) : status_(s) {}
  Status status_;
  Witness witness_;
  std::string reason_;
};

}  // namespace ctree
