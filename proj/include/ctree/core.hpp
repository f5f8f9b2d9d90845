#pragma once

#include <cstdint>
#include <vector>

#include "ctree/deftable.hpp"
#include "ctree/tree.hpp"

namespace ctree {

Value guard(Value t);  // brD 1
Value step(Value t);   // brS 1
Value stuck_d();       // brD 0
Value stuck_s();       // brS 0
Value spin_d();
Value spin_s();
Value spin_d_nary(std::int64_t n);
Value spin_s_nary(std::int64_t n);
Value trigger(Value e);
Value br_s_atom(std::int64_t n);  // brS n returning the chosen index
Value br_d_atom(std::int64_t n);

// Branches over explicit children.
Value brS_of(std::vector<Value> children);
Value brD_of(std::vector<Value> children);
Value vis_of(Value e, std::vector<Value> children);  // one child per answer, in order

Value bind(Value t, Value k);
Value seq(Value t, Value u);  // bind(t, const u)

/// `body` is a Cont from an index to a tree returning inl(next) or inr(result).
Value iter(Value body, Value i0);

Value head(Value t);
Value br_s_elim(Value t);

// HeadAction leaves.
Value a_ret(Value v);
Value a_br(std::int64_t n, Value k);
Value a_vis(Value e, Value k);

/// A finite, possibly cyclic tree given as a node table. Each node is one of
///   (ret V) | (vis EVENT (SUCC...)) | (br s|d (SUCC...)) | (tree T)
/// where SUCC are node indices; a vis lists one successor per answer.
Value graph(Value nodes, std::int64_t root);

/// Fully expands `t` to depth `d`, replacing every Call by its unfolding;
/// deeper subtrees are cut to the symbol `cut`. For dumps and tests.
Value expand(const DefTable& defs, const Value& t, int depth);

}  // namespace ctree
