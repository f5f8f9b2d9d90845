#pragma once

#include <cstddef>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "ctree/deftable.hpp"
#include "ctree/lts.hpp"
#include "ctree/verdict.hpp"

namespace ctree {

/// Relation used to match a left label against a right label.
struct LabelRel {
  std::string name;
  std::function<bool(const Label& left, const Label& right)> related;
  bool is_equality = false;

  static LabelRel equality();
  /// Val((s v)) on the left matches Val(v) on the right; other labels must be equal.
  static LabelRel val_projection();
};

enum class GameKind { Bisimulation, Simulation };

struct GameOptions {
  LabelRel rel = LabelRel::equality();
  GameKind kind = GameKind::Bisimulation;
  std::size_t max_positions = 2'000'000;
};

/// Solves the (bi)simulation game between states `left` and `right` of `lts`.
/// Positions touching a frontier state are conceded to the defender, so a
/// Fails verdict is always genuine and partial systems give Unknown otherwise.
Verdict solve_game(const FiniteLTS& lts, std::size_t left, std::size_t right, const GameOptions& opt);

/// Coarsest strong bisimulation of a complete LTS, as block ids.
std::vector<std::size_t> bisim_partition(const FiniteLTS& lts);

/// Strong bisimilarity on an explicit LTS: partition refinement when the LTS
/// is complete, with the game used to produce the counterexample.
Verdict bisim_states(const FiniteLTS& lts, std::size_t left, std::size_t right);

/// Re-checks a game witness against the LTS it was computed on.
bool replay(const FiniteLTS& lts, const Witness& w, const GameOptions& opt, std::string* why = nullptr);

Verdict check_equ(const DefTable& defs, const Value& t, const Value& u, const Budget& b);
Verdict check_sbisim(const DefTable& defs, const Value& t, const Value& u, const Budget& b,
                     const LabelRel& rel = LabelRel::equality());
Verdict check_wbisim(const DefTable& defs, const Value& t, const Value& u, const Budget& b);
Verdict check_ssim(const DefTable& defs, const Value& t, const Value& u, const Budget& b,
                   const LabelRel& rel = LabelRel::equality());

struct TraceSet {
  std::set<std::vector<Label>> traces;
  bool partial = false;
};

/// Completed traces: every label sequence that reaches length `d` or ends in
/// a state without transitions.
TraceSet traces_to_depth(const FiniteLTS& lts, std::size_t state, std::size_t d);
TraceSet traces_to_depth(const DefTable& defs, const Value& t, std::size_t d, const Budget& b);
Verdict check_trace_equiv(const DefTable& defs, const Value& t, const Value& u, std::size_t d, const Budget& b);

}  // namespace ctree
