#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ctree {

/// Immutable first-order datum: a signed integer, a symbol, or a tuple of
/// Values. Every tree, event, continuation, and state key in the library is a
/// Value, so equality, ordering, hashing, and the canonical text form are
/// defined once here.
///
/// Copies share structure. Equality and ordering are structural; the order is
/// Int < Sym < Tuple, integers numerically, symbols lexicographically, tuples
/// lexicographically by element then by length.
class Value {
 public:
  enum class Kind : std::uint8_t { Int, Sym, Tuple };

  /// The empty tuple `()`, used as the unit value.
  Value();

  static Value integer(std::int64_t n);
  static Value symbol(std::string_view name);
  static Value tuple(std::vector<Value> items);
  static Value tuple(std::initializer_list<Value> items);

  Kind kind() const noexcept;
  bool is_int() const noexcept { return kind() == Kind::Int; }
  bool is_sym() const noexcept { return kind() == Kind::Sym; }
  bool is_tuple() const noexcept { return kind() == Kind::Tuple; }
  bool is_unit() const noexcept { return is_tuple() && size() == 0; }

  std::int64_t as_int() const;
  const std::string& as_sym() const;
  std::span<const Value> items() const;
  std::size_t size() const noexcept;
  const Value& operator[](std::size_t i) const;

  /// True when this is a tuple whose first element is the symbol `tag`.
  bool has_head(std::string_view tag) const noexcept;

  std::size_t hash() const noexcept;

  /// Canonical s-expression; injective, stable across runs.
  std::string str() const;
  void write(std::string& out) const;

  /// Inverse of str(). Throws ParseError on malformed input.
  static Value parse(std::string_view text);

  friend bool operator==(const Value& a, const Value& b) noexcept;
  friend std::strong_ordering operator<=>(const Value& a, const Value& b) noexcept;

 private:
  struct Node;
  explicit Value(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

struct ValueHash {
  std::size_t operator()(const Value& v) const noexcept { return v.hash(); }
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& expected);
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Short constructors used throughout the library.
inline Value vint(std::int64_t n) { return Value::integer(n); }
inline Value vsym(std::string_view s) { return Value::symbol(s); }
inline Value vtup(std::initializer_list<Value> xs) { return Value::tuple(xs); }
inline Value unit() { return Value(); }
inline Value vbool(bool b) { return Value::integer(b ? 1 : 0); }

/// Tuple of integers lo..hi-1.
Value int_range(std::int64_t lo, std::int64_t hi);

}  // namespace ctree
