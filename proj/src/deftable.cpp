#include "ctree/deftable.hpp"

#include "ctree/tree.hpp"

namespace ctree {

const DefTable& DefTable::standard() {
  static const DefTable table = [] {
    DefTable t;
    register_core(t);
    register_interp(t);
    register_ccs(t);
    register_coop(t);
    register_laws(t);
    return t;
  }();
  return table;
}

void DefTable::define(std::string name, std::size_t arity, DefBody body) {
  Value::symbol(name);  // validates the identifier
  if (defs_.count(name)) throw std::logic_error("definition '" + name + "' already exists");
  defs_.emplace(std::move(name), Def{arity, std::move(body)});
}

bool DefTable::contains(std::string_view name) const { return defs_.find(name) != defs_.end(); }

std::size_t DefTable::arity(std::string_view name) const {
  auto it = defs_.find(name);
  if (it == defs_.end()) throw UnknownDefinition(std::string(name));
  return it->second.arity;
}

Value DefTable::unfold(const Value& t) const {
  Value cur = t;
  std::size_t steps = 0;
  while (cur.has_head("call")) {
    const std::string& name = call_name(cur);
    auto it = defs_.find(name);
    if (it == defs_.end()) throw UnknownDefinition(name);
    auto args = cur.items().subspan(2);
    if (args.size() != it->second.arity) throw ArityMismatch(name, it->second.arity, args.size());
    if (++steps > unfold_limit) throw UnguardedRecursion(name);
    Value next = it->second.body(*this, args);
    cur = std::move(next);
  }
  return cur;
}

Value DefTable::apply(const Value& k, const Value& x) const { return unfold(ctree::apply(k, x)); }

}  // namespace ctree
