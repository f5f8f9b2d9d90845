#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ctree/equiv.hpp"
#include "ctree/interp.hpp"
#include "ctree/lts.hpp"
#include "ctree/value.hpp"

namespace ctree::coop {

// Expressions:  (num n) | (var x) | (true) | (false) | (OP e1 e2)
//   with OP in add, sub, lt, le, eq, ne.
// Statements:   (skip) | (assign x e) | (seq s1 s2) | (while e s)
//               | (fork s1 s2) | (yield)
//   and, in the ImpBr dialect, (br s1 s2) | (block) | (print).

Value skip();
Value assign(std::string_view x, Value e);
Value seq(Value s1, Value s2);
Value while_(Value cond, Value body);
Value fork(Value s1, Value s2);
Value yield();
Value br(Value s1, Value s2);
Value block();
Value print();

Value num(std::int64_t n);
Value var(std::string_view x);
Value truth(bool b);
Value binop(std::string_view op, Value l, Value r);

class SyntaxError : public ParseError {
 public:
  using ParseError::ParseError;
};

class UndeclaredVariable : public std::runtime_error {
 public:
  explicit UndeclaredVariable(const std::string& x) : std::runtime_error("undeclared variable " + x), name_(x) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// Statements separated by ';' (a trailing ';' is allowed), '#' comments.
///   s ::= skip | yield | x := e | while e do P end | fork { P } { P } | ( P )
/// ImpBr replaces fork and yield with
///   br { P } { P } | block | print
///   e ::= a (('<' | '<=' | '=' | '!=') a)?    a ::= t (('+' | '-') t)*
///   t ::= n | true | false | x | ( e )
Value parse_imp(std::string_view text);
Value parse_impbr(std::string_view text);
std::string show(const Value& s);

/// Variables mentioned by a statement, sorted.
std::vector<std::string> variables(const Value& s);

/// Values are 0..domain-1; literals and arithmetic wrap modulo the domain and
/// comparisons yield 0 or 1. A condition holds when its value is nonzero.
struct Config {
  std::int64_t domain = 3;
};

enum class BrMode { VisFlip, BrS, BrD };

Value yield_event();
Value spawn_event();  // answers 0 (continuing thread) and 1 (spawned thread)
Value rd_event(std::string_view x, const Config& cfg);
Value wr_event(std::string_view x, std::int64_t v);
Value flip_event();   // answers 0 (false) and 1 (true)
Value print_event();

Value denote(const Value& s, const Config& cfg = {});
Value denote_impbr(const Value& s, BrMode mode, const Config& cfg = {});

/// The scheduler over a pool of threads; `active` is an index or -1 for none.
Value schedule(std::vector<Value> pool, std::int64_t active);
Value run_scheduled(const Value& s, const Config& cfg = {});

/// A store total on `vars`, every variable at 0 unless given.
Value make_store(const std::vector<std::string>& vars, const std::vector<std::pair<std::string, std::int64_t>>& init = {});

/// Memory interpretation of the scheduled program. Every variable of `s` must
/// be bound in `store`, and stored values must lie in the domain.
Value run_program(const Value& s, const Value& store, const Config& cfg = {});
/// The same for ImpBr, which has no threads.
Value run_impbr(const Value& s, BrMode mode, const Value& store, const Config& cfg = {});

}  // namespace ctree::coop
