#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ctree/value.hpp"

namespace ctree {

class DefTable;

/// A definition body maps its arguments to a tree. It may itself unfold its
/// tree arguments through the table it receives.
using DefBody = std::function<Value(const DefTable&, std::span<const Value>)>;

class UnknownDefinition : public std::runtime_error {
 public:
  explicit UnknownDefinition(const std::string& name)
      : std::runtime_error("unknown definition '" + name + "'") {}
};

class ArityMismatch : public std::runtime_error {
 public:
  ArityMismatch(const std::string& name, std::size_t expected, std::size_t got)
      : std::runtime_error("definition '" + name + "' expects " + std::to_string(expected) +
                           " arguments, got " + std::to_string(got)) {}
};

class UnguardedRecursion : public std::runtime_error {
 public:
  explicit UnguardedRecursion(const std::string& name)
      : std::runtime_error("no constructor reached while unfolding '" + name + "'") {}
};

/// Named, fixed-arity tree definitions. Append-only while being built; after
/// that every member is const and may be shared between threads.
class DefTable {
 public:
  DefTable() = default;

  /// The table with every definition shipped by the library.
  static const DefTable& standard();

  /// Throws std::logic_error when `name` is already defined.
  void define(std::string name, std::size_t arity, DefBody body);
  bool contains(std::string_view name) const;
  std::size_t arity(std::string_view name) const;

  /// Resolves Call roots until a Ret, Vis, or Br node appears. Other roots are
  /// returned unchanged.
  Value unfold(const Value& t) const;

  /// unfold(apply(k, x)).
  Value apply(const Value& k, const Value& x) const;

  std::size_t unfold_limit = 1'000'000;

 private:
  struct Def {
    std::size_t arity;
    DefBody body;
  };
  std::map<std::string, Def, std::less<>> defs_;
};

// Registration hooks used by DefTable::standard().
void register_core(DefTable& defs);
void register_interp(DefTable& defs);
void register_ccs(DefTable& defs);
void register_coop(DefTable& defs);
void register_laws(DefTable& defs);

}  // namespace ctree
