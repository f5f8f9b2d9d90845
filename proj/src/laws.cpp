#include "ctree/laws.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "ctree/core.hpp"
#include "ctree/equiv.hpp"
#include "ctree/interp.hpp"

namespace ctree {

// ---------------------------------------------------------------------------
// Generation

TreeGen::TreeGen(std::uint64_t seed, GenConfig cfg) : rng_(seed), cfg_(cfg) {}

Value TreeGen::event() {
  switch (below(3)) {
    case 0: return ctree::event("a", {}, {vint(0)});
    case 1: return ctree::event("b", {}, {vint(0), vint(1)});
    default: return ctree::event("c", {}, {vint(0), vint(1), vint(2)});
  }
}

Value TreeGen::stuck_tree() {
  switch (below(6)) {
    case 0: return stuck_d();
    case 1: return spin_d();
    case 2: return spin_d_nary(static_cast<std::int64_t>(1 + below(3)));
    case 3: return spin_s_nary(0);
    case 4: return guard(brD_of({stuck_d(), spin_d()}));
    default: return br_d_atom(0);
  }
}

Value TreeGen::tree() {
  std::vector<Value> pool;
  for (int i = 0; i < cfg_.ret_values; ++i) pool.push_back(vint(i));
  return tree(pool);
}

Value TreeGen::tree(const std::vector<Value>& returns) {
  std::vector<Value> nodes;
  std::vector<std::int64_t> ancestors;  // back edges only close cycles, never lengthen paths
  auto leaf = [&]() -> Value {
    switch (below(8)) {
      case 0: return vtup({vsym("tree"), spin_d()});
      case 1: return vtup({vsym("tree"), spin_s()});
      case 2: return vtup({vsym("tree"), stuck_d()});
      default: return vtup({vsym("ret"), returns[below(returns.size())]});
    }
  };
  std::function<std::int64_t(int)> build = [&](int depth) -> std::int64_t {
    auto id = static_cast<std::int64_t>(nodes.size());
    if (!ancestors.empty() && chance(cfg_.back_edge_percent)) return ancestors[below(ancestors.size())];
    nodes.push_back(unit());
    bool full = static_cast<int>(nodes.size()) >= cfg_.max_nodes;
    if (depth >= cfg_.max_depth || full || below(4) == 0) {
      nodes[id] = leaf();
      return id;
    }
    auto kids = [&](std::size_t n) {
      std::vector<Value> ks;
      ancestors.push_back(id);
      for (std::size_t i = 0; i < n; ++i) ks.push_back(vint(build(depth + 1)));
      ancestors.pop_back();
      return Value::tuple(std::move(ks));
    };
    switch (below(3)) {
      case 0: {
        Value e = event();
        nodes[id] = vtup({vsym("vis"), e, kids(event_answers(e).size())});
        break;
      }
      case 1:
        nodes[id] = vtup({vsym("br"), vsym("s"), kids(below(static_cast<std::uint64_t>(cfg_.max_width) + 1))});
        break;
      default:
        nodes[id] = vtup({vsym("br"), vsym("d"), kids(below(static_cast<std::uint64_t>(cfg_.max_width) + 1))});
        break;
    }
    return id;
  };
  std::int64_t root = build(0);
  return graph(Value::tuple(std::move(nodes)), root);
}

namespace {

bool is_graph(const Value& t) { return t.has_head("call") && call_name(t) == "graph"; }

Value wrap_root(TreeGen& g, const Value& t) {
  switch (g.below(4)) {
    case 0: return guard(t);
    case 1: return brD_of({t, t});
    case 2: return brD_of({t, stuck_d()});
    default: return brD_of({stuck_d(), t});
  }
}

}  // namespace

Value TreeGen::rewrite(const Value& t, int steps) {
  if (!is_graph(t)) {
    Value out = t;
    for (int i = 0; i < steps; ++i) out = wrap_root(*this, out);
    return out;
  }
  std::vector<Value> nodes(t[2].items().begin(), t[2].items().end());
  std::int64_t root = t[3].as_int();
  auto push = [&](Value n) {
    nodes.push_back(std::move(n));
    return vint(static_cast<std::int64_t>(nodes.size() - 1));
  };
  for (int s = 0; s < steps; ++s) {
    std::size_t j = below(nodes.size());
    Value node = nodes[j];
    bool is_br = node[0].as_sym() == "br";
    switch (below(is_br ? 6 : 3)) {
      case 0: nodes[j] = vtup({vsym("br"), vsym("d"), vtup({push(node)})}); break;
      case 1: {
        Value c = push(node);
        nodes[j] = vtup({vsym("br"), vsym("d"), vtup({c, c})});
        break;
      }
      case 2: {
        Value c = push(node);
        Value z = push(vtup({vsym("br"), vsym("d"), unit()}));
        nodes[j] = vtup({vsym("br"), vsym("d"), chance(50) ? vtup({c, z}) : vtup({z, c})});
        break;
      }
      default: {
        std::vector<Value> kids(node[2].items().begin(), node[2].items().end());
        if (!kids.empty() && chance(50)) kids.push_back(kids[below(kids.size())]);
        std::shuffle(kids.begin(), kids.end(), rng_);
        nodes[j] = vtup({node[0], node[1], Value::tuple(std::move(kids))});
        break;
      }
    }
  }
  return graph(Value::tuple(std::move(nodes)), root);
}

Value TreeGen::itree() {
  std::vector<Value> nodes;
  std::vector<std::int64_t> ancestors;
  std::function<std::int64_t(int)> build = [&](int depth) -> std::int64_t {
    if (!ancestors.empty() && chance(cfg_.back_edge_percent)) return ancestors[below(ancestors.size())];
    auto id = static_cast<std::int64_t>(nodes.size());
    nodes.push_back(unit());
    bool full = static_cast<int>(nodes.size()) >= cfg_.max_nodes;
    if (depth >= cfg_.max_depth || full || below(4) == 0) {
      // Occasionally a silent loop.
      nodes[id] = chance(10) ? vtup({vsym("later"), vint(id)}) : vtup({vsym("ret"), vint(static_cast<std::int64_t>(below(3)))});
      return id;
    }
    ancestors.push_back(id);
    if (chance(30)) {
      nodes[id] = vtup({vsym("later"), vint(build(depth + 1))});
    } else {
      Value e = chance(25) ? choose_event(static_cast<std::int64_t>(1 + below(3))) : event();
      std::vector<Value> ks;
      for (std::size_t i = 0; i < event_answers(e).size(); ++i) ks.push_back(vint(build(depth + 1)));
      nodes[id] = vtup({vsym("vis"), e, Value::tuple(std::move(ks))});
    }
    ancestors.pop_back();
    return id;
  };
  std::int64_t root = build(0);
  return igraph(Value::tuple(std::move(nodes)), root);
}

Value TreeGen::pad_laters(const Value& it, int count) {
  std::vector<Value> nodes(it[2].items().begin(), it[2].items().end());
  for (int i = 0; i < count; ++i) {
    std::size_t j = below(nodes.size());
    nodes.push_back(nodes[j]);
    nodes[j] = vtup({vsym("later"), vint(static_cast<std::int64_t>(nodes.size() - 1))});
  }
  return igraph(Value::tuple(std::move(nodes)), it[3].as_int());
}

std::optional<Value> TreeGen::mutate_return(const Value& it) {
  std::vector<Value> nodes(it[2].items().begin(), it[2].items().end());
  std::vector<std::size_t> rets;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i][0].as_sym() == "ret") rets.push_back(i);
  }
  if (rets.empty()) return std::nullopt;
  nodes[rets[below(rets.size())]] = vtup({vsym("ret"), vint(99)});
  return igraph(Value::tuple(std::move(nodes)), it[3].as_int());
}

// ---------------------------------------------------------------------------
// Templates for the composite sides of the iteration laws

namespace {

using Args = std::span<const Value>;

bool tag_is(const Value& x, std::int64_t tag) { return x[0].as_int() == tag; }

}  // namespace

void register_laws(DefTable& defs) {
  // (f, guarded, x): continue with (possibly guarded) iteration or exit.
  defs.define("law.fix.case", 3, [](const DefTable&, Args a) {
    const Value& x = a[2];
    if (tag_is(x, 1)) return ret(x[1]);
    Value again = iter(a[0], x[1]);
    return a[1].as_int() ? guard(again) : again;
  });
  defs.define("law.inr", 1, [](const DefTable&, Args a) { return ret(inr(a[0])); });
  defs.define("law.nat.body", 3, [](const DefTable&, Args a) {
    return bind(apply(a[0], a[2]), cont("law.nat.case", {a[1]}));
  });
  defs.define("law.nat.case", 2, [](const DefTable&, Args a) {
    const Value& x = a[1];
    if (tag_is(x, 0)) return ret(x);
    return bind(apply(a[0], x[1]), cont("law.inr"));
  });
  // (f, g, a) -> f a >>= case g (ret . inr)
  defs.define("law.dinat.body", 3, [](const DefTable&, Args a) {
    return bind(apply(a[0], a[2]), cont("law.dinat.case", {a[1]}));
  });
  defs.define("law.dinat.case", 2, [](const DefTable&, Args a) {
    const Value& x = a[1];
    if (tag_is(x, 0)) return apply(a[0], x[1]);
    return ret(x);
  });
  // (f, g, x) -> case (iter (g >=> case f (ret . inr))) ret
  defs.define("law.dinat.rcase", 3, [](const DefTable&, Args a) {
    const Value& x = a[2];
    if (tag_is(x, 1)) return ret(x[1]);
    return iter(cont("law.dinat.body", {a[1], a[0]}), x[1]);
  });
  defs.define("law.iter", 2, [](const DefTable&, Args a) { return iter(a[0], a[1]); });
  defs.define("law.codiag.body", 2, [](const DefTable&, Args a) {
    return bind(apply(a[0], a[1]), cont("law.codiag.case"));
  });
  defs.define("law.codiag.case", 1, [](const DefTable&, Args a) {
    const Value& x = a[0];
    if (tag_is(x, 0)) return ret(x);
    return ret(x[1]);
  });
}

// ---------------------------------------------------------------------------
// Laws

namespace {

enum class Shape { Equation, Iff, Implication };

struct Outcome {
  Shape shape = Shape::Equation;
  Verdict premise = Verdict::holds();
  Verdict conclusion = Verdict::holds();
  std::string text;  // instance description for counterexamples
};

struct LawCase {
  std::string relation;
  std::function<Outcome(TreeGen&, const Budget&)> run;
};

const DefTable& D() { return DefTable::standard(); }

Outcome equation(const std::string& rel, const Value& l, const Value& r, const Budget& b) {
  Outcome o;
  if (rel == "equ") o.conclusion = check_equ(D(), l, r, b);
  else if (rel == "wbisim") o.conclusion = check_wbisim(D(), l, r, b);
  else o.conclusion = check_sbisim(D(), l, r, b);
  o.text = l.str() + "  vs  " + r.str();
  return o;
}

Verdict all_of(const std::vector<Verdict>& vs) {
  bool unknown = false;
  for (const auto& v : vs) {
    if (v.is_fails()) return v;
    if (v.is_unknown()) unknown = true;
  }
  return unknown ? Verdict::unknown("a sub-check was inconclusive") : Verdict::holds();
}

// Every element of `from` is bisimilar to some element of `to`.
Verdict injects(const std::vector<Value>& from, const std::vector<Value>& to, const Budget& b) {
  std::vector<Verdict> rows;
  for (const auto& x : from) {
    bool found = false, unknown = false;
    for (const auto& y : to) {
      auto v = check_sbisim(D(), x, y, b);
      if (v.is_holds()) {
        found = true;
        break;
      }
      if (v.is_unknown()) unknown = true;
    }
    if (found) rows.push_back(Verdict::holds());
    else if (unknown) rows.push_back(Verdict::unknown("inconclusive"));
    else rows.push_back(Verdict::fails(Witness{"structural", {}, {}, {}, {}, "no match for " + x.str()}));
  }
  return all_of(rows);
}

// Children of the right side: a covering remap of the left children through
// sound rewrites, or fresh random trees.
std::vector<Value> related_children(TreeGen& g, const std::vector<Value>& hs, bool related) {
  std::vector<Value> ks;
  if (!related) {
    std::size_t m = g.below(4);
    for (std::size_t i = 0; i < m; ++i) ks.push_back(g.tree());
    return ks;
  }
  std::vector<std::size_t> idx(hs.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t extra = g.below(2); extra > 0 && !hs.empty(); --extra) idx.push_back(g.below(hs.size()));
  std::shuffle(idx.begin(), idx.end(), g.rng());
  for (auto i : idx) ks.push_back(g.chance(70) ? g.rewrite(hs[i], 1) : hs[i]);
  return ks;
}

std::vector<Value> some_trees(TreeGen& g, std::size_t n) {
  std::vector<Value> ts;
  for (std::size_t i = 0; i < n; ++i) ts.push_back(g.tree());
  return ts;
}

std::string list_str(const std::vector<Value>& xs) {
  std::string s = "[";
  for (const auto& x : xs) s += (s.size() > 1 ? " " : "") + x.str();
  return s + "]";
}

Value body_table(TreeGen& g, const std::vector<Value>& pool) {
  std::vector<Value> ts;
  for (int i = 0; i < 3; ++i) ts.push_back(g.tree(pool));
  return k_sel(std::move(ts));
}

std::vector<Value> tagged_pool() {
  std::vector<Value> p;
  for (int tag = 0; tag < 2; ++tag)
    for (int i = 0; i < 3; ++i) p.push_back(vtup({vint(tag), vint(i)}));
  return p;
}

std::map<std::string, std::vector<std::pair<std::string, LawCase>>> build_laws() {
  std::map<std::string, std::vector<std::pair<std::string, LawCase>>> s;
  auto& el = s["elementary"];
  auto eq = [](std::string rel, std::function<std::pair<Value, Value>(TreeGen&)> mk) {
    return LawCase{rel, [rel, mk](TreeGen& g, const Budget& b) {
                     auto [l, r] = mk(g);
                     return equation(rel, l, r, b);
                   }};
  };

  el.emplace_back("ret_inj", LawCase{"sbisim", [](TreeGen& g, const Budget& b) {
                    auto x = vint(static_cast<std::int64_t>(g.below(3)));
                    auto y = vint(static_cast<std::int64_t>(g.below(3)));
                    Outcome o{Shape::Iff, x == y ? Verdict::holds() : Verdict::fails(Witness{}),
                              check_sbisim(D(), ret(x), ret(y), b), x.str() + " " + y.str()};
                    return o;
                  }});
  el.emplace_back("vis_inj", LawCase{"sbisim", [](TreeGen& g, const Budget& b) {
                    Value e = g.event();
                    std::size_t n = event_answers(e).size();
                    auto hs = some_trees(g, n);
                    std::vector<Value> ks;
                    bool related = g.chance(60);
                    for (const auto& h : hs) ks.push_back(related || g.chance(50) ? g.rewrite(h) : g.tree());
                    std::vector<Verdict> pre;
                    for (std::size_t i = 0; i < n; ++i) pre.push_back(check_sbisim(D(), hs[i], ks[i], b));
                    return Outcome{Shape::Iff, all_of(pre), check_sbisim(D(), vis_of(e, hs), vis_of(e, ks), b),
                                   list_str(hs) + "  vs  " + list_str(ks)};
                  }});
  auto branch_law = [](bool stepping, bool iff) {
    return [stepping, iff](TreeGen& g, const Budget& b) {
      auto hs = some_trees(g, g.below(4));
      auto ks = related_children(g, hs, !iff || g.chance(60));
      Verdict pre = all_of({injects(hs, ks, b), injects(ks, hs, b)});
      Value l = stepping ? brS_of(hs) : brD_of(hs);
      Value r = stepping ? brS_of(ks) : brD_of(ks);
      return Outcome{iff ? Shape::Iff : Shape::Implication, pre, check_sbisim(D(), l, r, b),
                     list_str(hs) + "  vs  " + list_str(ks)};
    };
  };
  el.emplace_back("brs_inj", LawCase{"sbisim", branch_law(true, true)});
  el.emplace_back("brd_inj", LawCase{"sbisim", branch_law(false, false)});
  el.emplace_back("bind_cong", LawCase{"sbisim", [](TreeGen& g, const Budget& b) {
                    Value t = g.tree();
                    Value u = g.rewrite(t);
                    auto gs = some_trees(g, 3);
                    std::vector<Value> ks;
                    for (const auto& x : gs) ks.push_back(g.rewrite(x, 1));
                    std::vector<Verdict> pre{check_sbisim(D(), t, u, b)};
                    for (std::size_t i = 0; i < 3; ++i) pre.push_back(check_sbisim(D(), gs[i], ks[i], b));
                    Value l = bind(t, k_sel(gs)), r = bind(u, k_sel(ks));
                    return Outcome{Shape::Implication, all_of(pre), check_sbisim(D(), l, r, b),
                                   l.str() + "  vs  " + r.str()};
                  }});
  el.emplace_back("guard_id", eq("sbisim", [](TreeGen& g) {
                    Value t = g.tree();
                    return std::pair{guard(t), t};
                  }));
  el.emplace_back("stuck_unit", LawCase{"sbisim", [](TreeGen& g, const Budget& b) {
                    Value t = g.tree();
                    Value u = g.chance(70) ? g.stuck_tree() : g.tree();
                    Value l = brD_of({t, u});
                    return Outcome{Shape::Implication, is_stuck(D(), u, b), check_sbisim(D(), l, t, b),
                                   l.str() + "  vs  " + t.str()};
                  }});
  el.emplace_back("brd_assoc", eq("sbisim", [](TreeGen& g) {
                    Value t = g.tree(), u = g.tree(), v = g.tree();
                    return std::pair{brD_of({brD_of({t, u}), v}), brD_of({t, brD_of({u, v})})};
                  }));
  el.emplace_back("brd_comm", eq("sbisim", [](TreeGen& g) {
                    Value t = g.tree(), u = g.tree();
                    return std::pair{brD_of({t, u}), brD_of({u, t})};
                  }));
  el.emplace_back("brd_idem", eq("sbisim", [](TreeGen& g) {
                    Value t = g.tree();
                    return std::pair{brD_of({t, t}), t};
                  }));
  el.emplace_back("brd_flatten", eq("sbisim", [](TreeGen& g) {
                    Value t = g.tree(), u = g.tree(), v = g.tree();
                    return std::pair{brD_of({brD_of({t, u}), v}), brD_of({t, u, v})};
                  }));
  el.emplace_back("brs_comm", eq("sbisim", [](TreeGen& g) {
                    Value t = g.tree(), u = g.tree();
                    return std::pair{brS_of({t, u}), brS_of({u, t})};
                  }));
  el.emplace_back("brs_idem", eq("sbisim", [](TreeGen& g) {
                    Value t = g.tree();
                    return std::pair{brS_of({t, t}), step(t)};
                  }));
  el.emplace_back("step_weak", eq("wbisim", [](TreeGen& g) {
                    Value t = g.tree();
                    return std::pair{step(t), t};
                  }));
  el.emplace_back("spind_nary", eq("sbisim", [](TreeGen& g) {
                    return std::pair{spin_d_nary(static_cast<std::int64_t>(g.below(5))),
                                     spin_d_nary(static_cast<std::int64_t>(g.below(5)))};
                  }));
  el.emplace_back("spins_nary", LawCase{"sbisim", [](TreeGen& g, const Budget& b) {
                    auto n = static_cast<std::int64_t>(g.below(4)), m = static_cast<std::int64_t>(g.below(4));
                    Verdict pre = (n > 0) == (m > 0) ? Verdict::holds() : Verdict::fails(Witness{});
                    return Outcome{Shape::Iff, pre, check_sbisim(D(), spin_s_nary(n), spin_s_nary(m), b),
                                   std::to_string(n) + " " + std::to_string(m)};
                  }});
  el.emplace_back("brs_elim", eq("sbisim", [](TreeGen& g) {
                    Value t = g.tree();
                    return std::pair{br_s_elim(t), t};
                  }));

  auto& mo = s["monadic"];
  mo.emplace_back("left_id", eq("equ", [](TreeGen& g) {
                    Value k = k_sel(some_trees(g, 3));
                    Value v = vint(static_cast<std::int64_t>(g.below(3)));
                    return std::pair{bind(ret(v), k), apply(k, v)};
                  }));
  mo.emplace_back("right_id", eq("equ", [](TreeGen& g) {
                    Value t = g.tree();
                    return std::pair{bind(t, k_ret()), t};
                  }));
  mo.emplace_back("assoc", eq("equ", [](TreeGen& g) {
                    Value t = g.tree();
                    Value k = k_sel(some_trees(g, 3)), l = k_sel(some_trees(g, 3));
                    return std::pair{bind(bind(t, k), l), bind(t, cont("bind.k", {k, l}))};
                  }));

  auto& it = s["iter"];
  it.emplace_back("unfold", eq("equ", [](TreeGen& g) {
                    Value f = body_table(g, tagged_pool());
                    Value a = vint(static_cast<std::int64_t>(g.below(3)));
                    return std::pair{iter(f, a), bind(apply(f, a), cont("law.fix.case", {f, vint(1)}))};
                  }));
  it.emplace_back("fixed_point", eq("sbisim", [](TreeGen& g) {
                    Value f = body_table(g, tagged_pool());
                    Value a = vint(static_cast<std::int64_t>(g.below(3)));
                    return std::pair{iter(f, a), bind(apply(f, a), cont("law.fix.case", {f, vint(0)}))};
                  }));
  it.emplace_back("naturality", eq("equ", [](TreeGen& g) {
                    Value f = body_table(g, tagged_pool());
                    Value h = k_sel(some_trees(g, 3));
                    Value a = vint(static_cast<std::int64_t>(g.below(3)));
                    return std::pair{bind(iter(f, a), h), iter(cont("law.nat.body", {f, h}), a)};
                  }));
  it.emplace_back("dinaturality", eq("sbisim", [](TreeGen& g) {
                    Value f = body_table(g, tagged_pool()), h = body_table(g, tagged_pool());
                    Value a = vint(static_cast<std::int64_t>(g.below(3)));
                    return std::pair{iter(cont("law.dinat.body", {f, h}), a),
                                     bind(apply(f, a), cont("law.dinat.rcase", {f, h}))};
                  }));
  it.emplace_back("codiagonal", eq("equ", [](TreeGen& g) {
                    std::vector<Value> pool;
                    for (int i = 0; i < 3; ++i) {
                      pool.push_back(inl(vint(i)));
                      pool.push_back(inr(inl(vint(i))));
                      pool.push_back(inr(inr(vint(i))));
                    }
                    Value f = body_table(g, pool);
                    Value a = vint(static_cast<std::int64_t>(g.below(3)));
                    return std::pair{iter(cont("law.iter", {f}), a), iter(cont("law.codiag.body", {f}), a)};
                  }));
  return s;
}

const std::map<std::string, std::vector<std::pair<std::string, LawCase>>>& laws() {
  static const auto table = build_laws();
  return table;
}

std::uint64_t name_seed(std::uint64_t seed, const std::string& name) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : name) h = (h ^ c) * 1099511628211ull;
  return seed ^ h;
}

}  // namespace

std::vector<std::string> law_suites() { return {"elementary", "monadic", "iter"}; }

std::vector<std::string> law_names(const std::string& suite) {
  auto it = laws().find(suite);
  if (it == laws().end()) throw std::invalid_argument("unknown law suite '" + suite + "'");
  std::vector<std::string> out;
  for (const auto& [name, _] : it->second) out.push_back(name);
  return out;
}

LawReport check_law(const std::string& suite, const std::string& name, std::uint64_t seed, std::size_t instances,
                    const Budget& b) {
  auto it = laws().find(suite);
  if (it == laws().end()) throw std::invalid_argument("unknown law suite '" + suite + "'");
  auto law = std::find_if(it->second.begin(), it->second.end(), [&](const auto& p) { return p.first == name; });
  if (law == it->second.end()) throw std::invalid_argument("unknown law '" + name + "'");

  LawReport r;
  r.suite = suite;
  r.name = name;
  r.relation = law->second.relation;
  TreeGen g(name_seed(seed, suite + "/" + name));
  auto fail = [&](const Outcome& o) {
    ++r.fails;
    if (r.counterexamples.size() < 3) r.counterexamples.push_back(o.text);
  };
  // Implications only count instances with a true premise; give up after a
  // generous number of attempts so a bad generator cannot loop forever.
  for (std::size_t attempts = 0; r.checked < instances && attempts < 20 * instances; ++attempts) {
    Outcome o = law->second.run(g, b);
    switch (o.shape) {
      case Shape::Equation:
        ++r.checked;
        if (o.conclusion.is_fails()) fail(o);
        if (o.conclusion.is_unknown()) ++r.unknown;
        break;
      case Shape::Iff:
        ++r.checked;
        if (o.premise.is_unknown() || o.conclusion.is_unknown()) ++r.unknown;
        else if (o.premise.is_holds() != o.conclusion.is_holds()) fail(o);
        break;
      case Shape::Implication:
        if (o.premise.is_unknown()) {
          ++r.unknown;
          break;
        }
        if (o.premise.is_fails()) {
          ++r.vacuous;
          break;
        }
        ++r.checked;
        if (o.conclusion.is_fails()) fail(o);
        if (o.conclusion.is_unknown()) ++r.unknown;
        break;
    }
  }
  return r;
}

std::vector<LawReport> check_suite(const std::string& suite, std::uint64_t seed, std::size_t instances,
                                   const Budget& b, unsigned jobs) {
  auto names = law_names(suite);
  std::vector<LawReport> out(names.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < names.size();) out[i] = check_law(suite, names[i], seed, instances, b);
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(names.size())));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace ctree

namespace ctree {

namespace {

bool same_tree(const DefTable& defs, const Value& a, const Value& b, const Budget& bud) {
  Value ua = defs.unfold(a), ub = defs.unfold(b);
  return ua == ub || check_equ(defs, ua, ub, bud).is_holds();
}

Verdict bind_mismatch(const std::string& what, const Label& l, const Value& target) {
  return Verdict::fails(Witness{"structural", {l}, {}, {}, {}, what + " " + target.str()});
}

}  // namespace

Verdict check_bind_transitions(const DefTable& defs, const Value& t, const Value& k, const Budget& b) {
  Moves whole = transitions(defs, bind(t, k), b);
  Moves prefix = transitions(defs, t, b);
  if (whole.partial || prefix.partial) return Verdict::unknown("closure budget exhausted");
  std::vector<Moves> after;  // moves of k v, one entry per value move of t
  std::vector<Value> values;
  for (const auto& m : prefix.moves) {
    if (!m.label.is_val()) continue;
    values.push_back(m.label.value());
    after.push_back(transitions(defs, apply(k, m.label.value()), b));
    if (after.back().partial) return Verdict::unknown("closure budget exhausted");
  }

  // Every move of the bind decomposes.
  for (const auto& m : whole.moves) {
    bool ok = false;
    if (!m.label.is_val()) {
      for (const auto& p : prefix.moves) {
        if (p.label == m.label && same_tree(defs, m.target, bind(p.target, k), b)) ok = true;
      }
    }
    for (std::size_t i = 0; i < after.size() && !ok; ++i) {
      for (const auto& q : after[i].moves) {
        if (q.label == m.label && same_tree(defs, m.target, q.target, b)) ok = true;
      }
    }
    if (!ok) return bind_mismatch("move of the bind does not decompose:", m.label, m.target);
  }
  // Both introduction rules.
  auto present = [&](const Label& l, const Value& target) {
    for (const auto& m : whole.moves) {
      if (m.label == l && same_tree(defs, m.target, target, b)) return true;
    }
    return false;
  };
  for (const auto& p : prefix.moves) {
    if (!p.label.is_val() && !present(p.label, bind(p.target, k)))
      return bind_mismatch("prefix move lost under bind:", p.label, p.target);
  }
  for (const auto& a : after) {
    for (const auto& q : a.moves) {
      if (!present(q.label, q.target)) return bind_mismatch("continuation move lost under bind:", q.label, q.target);
    }
  }
  return Verdict::holds();
}

}  // namespace ctree
