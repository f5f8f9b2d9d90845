#include "ctree/core.hpp"

#include <stdexcept>

namespace ctree {

Value guard(Value t) { return brD(1, k_const(std::move(t))); }
Value step(Value t) { return brS(1, k_const(std::move(t))); }
Value stuck_d() { return brD(0, k_ret()); }
Value stuck_s() { return brS(0, k_ret()); }
Value spin_d() { return call("spinD"); }
Value spin_s() { return call("spinS"); }
Value spin_d_nary(std::int64_t n) { return call("spinD_nary", {vint(n)}); }
Value spin_s_nary(std::int64_t n) { return call("spinS_nary", {vint(n)}); }
Value trigger(Value e) { return vis(std::move(e), k_ret()); }
Value br_s_atom(std::int64_t n) { return brS(n, k_ret()); }
Value br_d_atom(std::int64_t n) { return brD(n, k_ret()); }

Value brS_of(std::vector<Value> children) {
  auto n = static_cast<std::int64_t>(children.size());
  return brS(n, k_sel(std::move(children)));
}

Value brD_of(std::vector<Value> children) {
  auto n = static_cast<std::int64_t>(children.size());
  return brD(n, k_sel(std::move(children)));
}

Value vis_of(Value e, std::vector<Value> children) {
  const auto answers = event_answers(e).items();
  if (answers.size() != children.size()) throw std::invalid_argument("vis_of: one child per answer expected");
  std::vector<std::pair<Value, Value>> table;
  for (std::size_t i = 0; i < answers.size(); ++i) table.emplace_back(answers[i], children[i]);
  return vis(std::move(e), k_case(std::move(table)));
}

Value bind(Value t, Value k) { return call("bind", {std::move(t), std::move(k)}); }
Value seq(Value t, Value u) { return bind(std::move(t), k_const(std::move(u))); }
Value iter(Value body, Value i0) { return call("iter", {std::move(body), std::move(i0)}); }
Value head(Value t) { return call("head", {std::move(t)}); }
Value br_s_elim(Value t) { return iter(cont("brselim.body"), std::move(t)); }

Value a_ret(Value v) { return vtup({vsym("aret"), std::move(v)}); }
Value a_br(std::int64_t n, Value k) { return vtup({vsym("abr"), vint(n), std::move(k)}); }
Value a_vis(Value e, Value k) { return vtup({vsym("avis"), std::move(e), std::move(k)}); }

Value graph(Value nodes, std::int64_t root) { return call("graph", {std::move(nodes), vint(root)}); }

Value expand(const DefTable& defs, const Value& t, int depth) {
  if (depth <= 0) return vsym("cut");
  Value u = defs.unfold(t);
  switch (node_kind(u)) {
    case NodeKind::Ret:
      return u;
    case NodeKind::Vis: {
      std::vector<Value> kids;
      for (const auto& a : event_answers(vis_event(u)).items()) {
        kids.push_back(expand(defs, apply(node_cont(u), a), depth - 1));
      }
      return vtup({vsym("vis"), vis_event(u), Value::tuple(std::move(kids))});
    }
    case NodeKind::Br: {
      std::vector<Value> kids;
      for (std::int64_t i = 0; i < br_width(u); ++i) {
        kids.push_back(expand(defs, apply(node_cont(u), vint(i)), depth - 1));
      }
      return vtup({vsym("br"), u[1], u[2], Value::tuple(std::move(kids))});
    }
    case NodeKind::Call:
      break;
  }
  throw std::logic_error("unfold returned a call");
}

namespace {

Value rebuild(const Value& node, Value k) {
  if (node.has_head("vis")) return vis(node[1], std::move(k));
  return Value::tuple({node[0], node[1], node[2], std::move(k)});
}

}  // namespace

void register_core(DefTable& defs) {
  using Args = std::span<const Value>;

  defs.define("ret", 1, [](const DefTable&, Args a) { return ret(a[0]); });
  defs.define("const", 2, [](const DefTable&, Args a) { return a[0]; });
  defs.define("sel", 2, [](const DefTable&, Args a) {
    auto i = a[1].as_int();
    if (i < 0 || static_cast<std::size_t>(i) >= a[0].size()) {
      throw std::out_of_range("branch index " + a[1].str() + " out of range");
    }
    return a[0][static_cast<std::size_t>(i)];
  });
  defs.define("case", 2, [](const DefTable&, Args a) {
    for (const auto& row : a[0].items()) {
      if (row[0] == a[1]) return row[1];
    }
    throw std::out_of_range("no case for " + a[1].str());
  });
  // Left injection of the unfolded continuation, shared by every iter body.
  defs.define("inl", 2, [](const DefTable& d, Args a) { return ret(inl(d.apply(a[0], a[1]))); });

  defs.define("bind", 2, [](const DefTable& d, Args a) {
    Value t = d.unfold(a[0]);
    if (t.has_head("ret")) return apply(a[1], t[1]);
    return rebuild(t, cont("bind.k", {node_cont(t), a[1]}));
  });
  defs.define("bind.k", 3, [](const DefTable&, Args a) { return bind(apply(a[0], a[2]), a[1]); });

  defs.define("spinD", 0, [](const DefTable&, Args) { return guard(spin_d()); });
  defs.define("spinS", 0, [](const DefTable&, Args) { return step(spin_s()); });
  defs.define("spinD_nary", 1, [](const DefTable&, Args a) {
    return bind(br_d_atom(a[0].as_int()), k_const(spin_d_nary(a[0].as_int())));
  });
  defs.define("spinS_nary", 1, [](const DefTable&, Args a) {
    return bind(br_s_atom(a[0].as_int()), k_const(spin_s_nary(a[0].as_int())));
  });

  defs.define("iter", 2, [](const DefTable&, Args a) {
    return bind(apply(a[0], a[1]), cont("iter.k", {a[0]}));
  });
  defs.define("iter.k", 2, [](const DefTable&, Args a) {
    const Value& x = a[1];
    if (!x.is_tuple() || x.size() != 2 || !x[0].is_int()) throw std::logic_error("iter body returned " + x.str());
    if (x[0].as_int() == 0) return guard(iter(a[0], x[1]));
    return ret(x[1]);
  });

  defs.define("head", 1, [](const DefTable& d, Args a) {
    Value t = d.unfold(a[0]);
    switch (node_kind(t)) {
      case NodeKind::Ret:
        return ret(a_ret(t[1]));
      case NodeKind::Vis:
        return ret(a_vis(t[1], t[2]));
      case NodeKind::Br:
        if (br_kind(t) == BranchKind::Stepping) return ret(a_br(br_width(t), t[3]));
        return brD(br_width(t), cont("head.k", {t[3]}));
      case NodeKind::Call:
        break;
    }
    throw std::logic_error("unreachable");
  });
  defs.define("head.k", 2, [](const DefTable&, Args a) { return head(apply(a[0], a[1])); });

  defs.define("brselim.body", 1, [](const DefTable& d, Args a) {
    Value t = d.unfold(a[0]);
    switch (node_kind(t)) {
      case NodeKind::Ret:
        return ret(inr(t[1]));
      case NodeKind::Vis:
        return bind(trigger(t[1]), cont("inl", {t[2]}));
      case NodeKind::Br:
        if (br_kind(t) == BranchKind::Delayed) return bind(br_d_atom(br_width(t)), cont("inl", {t[3]}));
        return bind(br_d_atom(br_width(t)), cont("brselim.step", {t[3]}));
      case NodeKind::Call:
        break;
    }
    throw std::logic_error("unreachable");
  });
  defs.define("brselim.step", 2, [](const DefTable& d, Args a) { return step(ret(inl(d.apply(a[0], a[1])))); });

  defs.define("graph", 2, [](const DefTable&, Args a) {
    const Value& g = a[0];
    const Value& node = g[static_cast<std::size_t>(a[1].as_int())];
    const std::string& tag = node[0].as_sym();
    if (tag == "ret") return node;
    if (tag == "tree") return node[1];
    std::vector<Value> rows;
    if (tag == "vis") {
      const auto answers = event_answers(node[1]).items();
      for (std::size_t i = 0; i < answers.size(); ++i) rows.push_back(vtup({answers[i], node[2][i]}));
      return vis(node[1], cont("graph.k", {g, a[1], Value::tuple(std::move(rows))}));
    }
    if (tag == "br") {
      for (std::size_t i = 0; i < node[2].size(); ++i) rows.push_back(vtup({vint(static_cast<std::int64_t>(i)), node[2][i]}));
      auto kind = node[1].as_sym() == "s" ? BranchKind::Stepping : BranchKind::Delayed;
      return br(kind, static_cast<std::int64_t>(node[2].size()), cont("graph.k", {g, a[1], Value::tuple(std::move(rows))}));
    }
    throw std::logic_error("bad graph node " + node.str());
  });
  // The node id is captured so that distinct nodes stay distinct states.
  defs.define("graph.k", 4, [](const DefTable&, Args a) {
    for (const auto& row : a[2].items()) {
      if (row[0] == a[3]) return graph(a[0], row[1].as_int());
    }
    throw std::out_of_range("graph successor for " + a[3].str());
  });
}

}  // namespace ctree
