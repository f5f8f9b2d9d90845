#pragma once

// Choice trees are plain Values with the following shapes:
//
//   (ret V)                 leaf
//   (vis EVENT CONT)        external event, one child per answer
//   (br s N CONT)           stepping branch of width N
//   (br d N CONT)           delayed branch of width N
//   (call NAME ARG...)      suspended definition, resolved by a DefTable
//
//   EVENT = (ev NAME (ARG...) (ANSWER...))
//   CONT  = (k TEMPLATE CAPTURED...)
//
// Applying CONT to x yields (call TEMPLATE CAPTURED... x), so every
// continuation template is a definition whose last parameter is the argument.

#include <cstdint>
#include <string_view>
#include <vector>

#include "ctree/value.hpp"

namespace ctree {

enum class BranchKind : std::uint8_t { Stepping, Delayed };
enum class NodeKind : std::uint8_t { Ret, Vis, Br, Call };

// Constructors.
Value ret(Value v);
Value vis(Value event, Value k);
Value br(BranchKind kind, std::int64_t width, Value k);
Value brS(std::int64_t width, Value k);
Value brD(std::int64_t width, Value k);
Value call(std::string_view def, std::vector<Value> args = {});
Value cont(std::string_view tmpl, std::vector<Value> captured = {});

/// Event with a non-empty, duplicate-free answer domain. Throws
/// std::invalid_argument otherwise.
Value event(std::string_view name, std::vector<Value> args, std::vector<Value> answers);

/// Cont application; the result is a Call and must be unfolded.
Value apply(const Value& k, const Value& x);

// Inspection. These throw std::logic_error on ill-formed trees.
NodeKind node_kind(const Value& t);
bool is_tree(const Value& t) noexcept;
const Value& ret_value(const Value& t);
const Value& vis_event(const Value& t);
const Value& node_cont(const Value& t);  // Vis or Br
BranchKind br_kind(const Value& t);
std::int64_t br_width(const Value& t);
const std::string& call_name(const Value& t);

const std::string& event_name(const Value& e);
const Value& event_args(const Value& e);
const Value& event_answers(const Value& e);
bool is_event(const Value& e) noexcept;

const std::string& cont_template(const Value& k);

// Continuations provided by the standard definitions.
Value k_ret();                        // x  -> Ret x
Value k_const(Value t);               // _  -> t
Value k_sel(std::vector<Value> ts);   // i  -> ts[i]
Value k_case(std::vector<std::pair<Value, Value>> table);  // x -> table[x]

// Sum encoding used by iter: (0 i) continues, (1 r) exits.
Value inl(Value v);
Value inr(Value v);

}  // namespace ctree
