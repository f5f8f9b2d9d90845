#include "ctree/interp.hpp"

#include <algorithm>
#include <random>
#include <unordered_set>

#include <json.hpp>

#include "ctree/core.hpp"
#include "ctree/tree.hpp"

namespace ctree {

namespace {

using Args = std::span<const Value>;

Value rows_value(std::vector<std::pair<Value, Value>> rows) {
  std::sort(rows.begin(), rows.end());
  std::vector<Value> out;
  for (auto& [k, v] : rows) out.push_back(vtup({std::move(k), std::move(v)}));
  return Value::tuple(std::move(out));
}

const Value& lookup(const Value& rows, const Value& e) {
  for (const auto& row : rows.items()) {
    if (row[0] == e) return row[1];
  }
  throw UnhandledEvent(e);
}

Value pair(Value a, Value b) { return vtup({std::move(a), std::move(b)}); }

}  // namespace

// ---------------------------------------------------------------------------
// Handlers

Handler Handler::identity() { return {cont("h.trigger"), Kind::Trigger}; }
Handler Handler::step_trigger() { return {cont("h.step_trigger"), Kind::General}; }
Handler Handler::pure(std::vector<std::pair<Value, Value>> rows) {
  return {cont("h.pure", {rows_value(std::move(rows))}), Kind::Pure};
}
Handler Handler::rename(std::vector<std::pair<Value, Value>> rows) {
  for (const auto& [e, f] : rows) {
    if (event_answers(e) != event_answers(f)) throw std::invalid_argument("rename changes the answer domain of " + e.str());
  }
  return {cont("h.rename", {rows_value(std::move(rows))}), Kind::Trigger};
}
Handler Handler::table(std::vector<std::pair<Value, Value>> rows) {
  return {cont("h.table", {rows_value(std::move(rows))}), Kind::General};
}

StateHandler StateHandler::memory() { return {cont("sh.memory"), true}; }
StateHandler StateHandler::lift(const Handler& h) { return {cont("sh.lift", {h.impl}), h.simple()}; }

Value store_get(const Value& store, const Value& x) {
  for (const auto& row : store.items()) {
    if (row[0] == x) return row[1];
  }
  return vint(0);
}

Value store_set(const Value& store, const Value& x, const Value& v) {
  std::vector<Value> rows;
  bool placed = false;
  for (const auto& row : store.items()) {
    if (!placed && x < row[0]) {
      rows.push_back(pair(x, v));
      placed = true;
    }
    if (row[0] == x) {
      rows.push_back(pair(x, v));
      placed = true;
    } else {
      rows.push_back(row);
    }
  }
  if (!placed) rows.push_back(pair(x, v));
  return Value::tuple(std::move(rows));
}

// ---------------------------------------------------------------------------
// Interpretation

Value interp(const Handler& h, Value t) { return iter(cont("interp.body", {h.impl}), std::move(t)); }

Value interp_state(const StateHandler& h, Value t, Value s0) {
  return iter(cont("istate.body", {h.impl}), pair(std::move(t), std::move(s0)));
}

Value refine(Value chooser, Value t) { return iter(cont("refine.body", {std::move(chooser)}), std::move(t)); }

namespace pick {
Value first() { return cont("pick.first"); }
Value last() { return cont("pick.last"); }
Value fixed(std::int64_t i) { return cont("pick.fixed", {vint(i)}); }
}  // namespace pick

Value refine_cst(Value p, Value t) { return refine(cont("refine.cst", {std::move(p)}), std::move(t)); }

namespace spick {
Value round_robin() { return cont("spick.rr"); }
Value constant(Value p) { return cont("spick.const", {std::move(p)}); }
}  // namespace spick

Value refine_state(Value sp, Value t, Value s0) {
  return iter(cont("rstate.body", {std::move(sp)}), pair(std::move(t), std::move(s0)));
}

// ---------------------------------------------------------------------------
// Random execution

std::string RunResult::outcome_name() const {
  switch (outcome) {
    case Outcome::Returned: return "returned";
    case Outcome::Stuck: return "stuck";
    case Outcome::OutOfSteps: return "out_of_steps";
  }
  return "";
}

std::string RunResult::to_json() const {
  nlohmann::ordered_json j;
  j["outcome"] = outcome_name();
  if (outcome == Outcome::Returned) j["value"] = value.str();
  auto tr = nlohmann::ordered_json::array();
  for (const auto& l : trace) tr.push_back(l.str());
  j["trace"] = tr;
  return j.dump(2);
}

RunResult run_random(const DefTable& defs, const Value& t, std::uint64_t seed, std::size_t max_steps,
                     const Budget& b) {
  std::mt19937_64 rng(seed);
  RunResult r;
  Value cur = defs.unfold(t);
  for (std::size_t step = 0;; ++step) {
    if (step == max_steps) {
      r.outcome = RunResult::Outcome::OutOfSteps;
      return r;
    }
    Moves m = transitions(defs, cur, b);
    if (m.partial) {
      r.outcome = RunResult::Outcome::OutOfSteps;
      return r;
    }
    if (m.moves.empty()) {
      r.outcome = RunResult::Outcome::Stuck;
      return r;
    }
    const Move& mv = m.moves[rng() % m.moves.size()];
    r.trace.push_back(mv.label);
    if (mv.label.is_val()) {
      r.outcome = RunResult::Outcome::Returned;
      r.value = mv.label.value();
      return r;
    }
    cur = mv.target;
  }
}

// ---------------------------------------------------------------------------
// Interaction trees

Value iret(Value v) { return vtup({vsym("iret"), std::move(v)}); }
Value ivis(Value e, Value k) { return vtup({vsym("ivis"), std::move(e), std::move(k)}); }
Value later(Value t) { return vtup({vsym("later"), std::move(t)}); }
Value igraph(Value nodes, std::int64_t root) { return call("igraph", {std::move(nodes), vint(root)}); }

Value choose_event(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("choose needs at least one answer");
  Value answers = int_range(0, n);
  return event("choose", {vint(n)}, std::vector<Value>(answers.items().begin(), answers.items().end()));
}

Value inject(Value it) { return iter(cont("inject.body"), std::move(it)); }
Value internalize(Value t) { return interp(Handler{cont("h.internalize"), Handler::Kind::General}, std::move(t)); }
Value embed(Value it) { return internalize(inject(std::move(it))); }

Verdict check_eutt(const DefTable& defs, const Value& it, const Value& iu, const Budget& b) {
  Value done = vsym("done");
  auto succ = [&](const Value& v) {
    Moves out;
    if (v == done) return out;
    Value cur = v;
    std::unordered_set<Value, ValueHash> seen;
    while (cur.has_head("later")) {
      if (!seen.insert(cur).second) {
        out.moves.push_back(Move{Label::tau(), v});
        out.divergent = true;
        return out;
      }
      if (seen.size() > b.max_closure_depth) {
        out.partial = true;
        return out;
      }
      cur = defs.unfold(cur[1]);
    }
    if (cur.has_head("iret")) {
      out.moves.push_back(Move{Label::val(cur[1]), done});
    } else if (cur.has_head("ivis")) {
      for (const auto& a : event_answers(cur[1]).items()) {
        out.moves.push_back(Move{Label::obs(cur[1], a), defs.apply(cur[2], a)});
      }
    } else {
      throw std::logic_error("not an interaction tree: " + cur.str());
    }
    std::sort(out.moves.begin(), out.moves.end(), [](const Move& x, const Move& y) {
      if (auto c = x.label <=> y.label; c != 0) return c < 0;
      return x.target < y.target;
    });
    return out;
  };
  FiniteLTS lts = explore({defs.unfold(it), defs.unfold(iu)}, succ, b.max_states);
  return bisim_states(lts, lts.roots[0], lts.roots[1]);
}

// ---------------------------------------------------------------------------
// Definitions

void register_interp(DefTable& defs) {
  defs.define("interp.body", 2, [](const DefTable& d, Args a) {
    Value t = d.unfold(a[1]);
    switch (node_kind(t)) {
      case NodeKind::Ret: return ret(inr(t[1]));
      case NodeKind::Br: return bind(br(br_kind(t), br_width(t), k_ret()), cont("inl", {t[3]}));
      case NodeKind::Vis: return bind(apply(a[0], t[1]), cont("inl", {t[2]}));
      default: throw std::logic_error("interp.body");
    }
  });
  defs.define("interp.k", 3, [](const DefTable&, Args a) {
    return iter(cont("interp.body", {a[0]}), apply(a[1], a[2]));
  });
  defs.define("h.trigger", 1, [](const DefTable&, Args a) { return trigger(a[0]); });
  defs.define("h.step_trigger", 1, [](const DefTable&, Args a) { return step(trigger(a[0])); });
  defs.define("h.pure", 2, [](const DefTable&, Args a) { return ret(lookup(a[0], a[1])); });
  defs.define("h.rename", 2, [](const DefTable&, Args a) { return trigger(lookup(a[0], a[1])); });
  defs.define("h.table", 2, [](const DefTable&, Args a) { return lookup(a[0], a[1]); });
  defs.define("h.internalize", 1, [](const DefTable&, Args a) {
    if (event_name(a[0]) == "choose") return br_s_atom(event_args(a[0])[0].as_int());
    return trigger(a[0]);
  });

  // State threading; branches leave the state alone.
  defs.define("istate.body", 2, [](const DefTable& d, Args a) {
    Value t = d.unfold(a[1][0]);
    const Value& s = a[1][1];
    switch (node_kind(t)) {
      case NodeKind::Ret: return ret(inr(pair(s, t[1])));
      case NodeKind::Br: return bind(br(br_kind(t), br_width(t), k_ret()), cont("istate.br", {t[3], s}));
      case NodeKind::Vis: return bind(apply(a[0], pair(s, t[1])), cont("istate.vis", {t[2]}));
      default: throw std::logic_error("istate.body");
    }
  });
  defs.define("istate.br", 3, [](const DefTable& d, Args a) { return ret(inl(pair(d.apply(a[0], a[2]), a[1]))); });
  defs.define("istate.vis", 2, [](const DefTable& d, Args a) {
    return ret(inl(pair(d.apply(a[0], a[1][1]), a[1][0])));
  });
  defs.define("sh.memory", 1, [](const DefTable&, Args a) {
    const Value& s = a[0][0];
    const Value& e = a[0][1];
    if (event_name(e) == "rd") return ret(pair(s, store_get(s, event_args(e)[0])));
    if (event_name(e) == "wr") return ret(pair(store_set(s, event_args(e)[0], event_args(e)[1]), unit()));
    throw UnhandledEvent(e);
  });
  defs.define("sh.lift", 2, [](const DefTable&, Args a) {
    return bind(apply(a[0], a[1][1]), cont("sh.pair", {a[1][0]}));
  });
  defs.define("sh.pair", 2, [](const DefTable&, Args a) { return ret(pair(a[0], a[1])); });

  // Refinement.
  defs.define("refine.body", 2, [](const DefTable& d, Args a) {
    Value t = d.unfold(a[1]);
    switch (node_kind(t)) {
      case NodeKind::Ret: return ret(inr(t[1]));
      case NodeKind::Br: {
        Value b = vint(br_kind(t) == BranchKind::Stepping ? 1 : 0);
        return bind(apply(a[0], pair(b, vint(br_width(t)))), cont("inl", {t[3]}));
      }
      case NodeKind::Vis: return bind(trigger(t[1]), cont("inl", {t[2]}));
      default: throw std::logic_error("refine.body");
    }
  });
  defs.define("pick.first", 1, [](const DefTable&, Args) { return ret(vint(0)); });
  defs.define("pick.last", 1, [](const DefTable&, Args a) { return ret(a[0][1]); });
  defs.define("pick.fixed", 2, [](const DefTable&, Args a) {
    return ret(vint(std::min(a[0].as_int(), a[1][1].as_int())));
  });
  defs.define("refine.cst", 2, [](const DefTable& d, Args a) {
    std::int64_t n = a[1][1].as_int();
    if (n == 0) return stuck_d();
    Value i = ret_value(d.apply(a[0], pair(a[1][0], vint(n - 1))));
    return a[1][0].as_int() ? step(ret(i)) : guard(ret(i));
  });
  defs.define("rstate.body", 2, [](const DefTable& d, Args a) {
    Value t = d.unfold(a[1][0]);
    const Value& s = a[1][1];
    switch (node_kind(t)) {
      case NodeKind::Ret: return ret(inr(pair(s, t[1])));
      case NodeKind::Br: {
        std::int64_t n = br_width(t);
        if (n == 0) return stuck_d();
        bool stepping = br_kind(t) == BranchKind::Stepping;
        Value si = ret_value(d.apply(a[0], vtup({s, vint(stepping ? 1 : 0), vint(n - 1)})));
        Value next = ret(inl(pair(d.apply(t[3], si[1]), si[0])));
        return stepping ? step(next) : next;
      }
      case NodeKind::Vis: return bind(trigger(t[1]), cont("istate.br", {t[2], s}));
      default: throw std::logic_error("rstate.body");
    }
  });
  defs.define("spick.rr", 1, [](const DefTable&, Args a) {
    std::int64_t c = a[0][0].as_int(), m = a[0][2].as_int();
    if (m == 0) return ret(pair(a[0][0], vint(0)));
    return ret(pair(vint((c + 1) % 6), vint(c % (m + 1))));
  });
  defs.define("spick.const", 2, [](const DefTable& d, Args a) {
    Value i = ret_value(d.apply(a[0], pair(a[1][1], a[1][2])));
    return ret(pair(a[1][0], i));
  });

  // Interaction trees.
  defs.define("inject.body", 1, [](const DefTable& d, Args a) {
    Value t = d.unfold(a[0]);
    if (t.has_head("iret")) return ret(inr(t[1]));
    if (t.has_head("later")) return ret(inl(d.unfold(t[1])));
    if (t.has_head("ivis")) return bind(trigger(t[1]), cont("inl", {t[2]}));
    throw std::logic_error("not an interaction tree: " + t.str());
  });
  defs.define("igraph", 2, [](const DefTable&, Args a) {
    const Value& node = a[0][static_cast<std::size_t>(a[1].as_int())];
    const std::string& tag = node[0].as_sym();
    if (tag == "ret") return iret(node[1]);
    if (tag == "later") return later(igraph(a[0], node[1].as_int()));
    if (tag == "vis") {
      std::vector<Value> rows;
      const auto answers = event_answers(node[1]).items();
      for (std::size_t i = 0; i < answers.size(); ++i) rows.push_back(pair(answers[i], node[2][i]));
      return ivis(node[1], cont("igraph.k", {a[0], a[1], Value::tuple(std::move(rows))}));
    }
    throw std::logic_error("bad itree node " + node.str());
  });
  defs.define("igraph.k", 4, [](const DefTable&, Args a) {
    for (const auto& row : a[2].items()) {
      if (row[0] == a[3]) return igraph(a[0], row[1].as_int());
    }
    throw std::out_of_range("itree successor for " + a[3].str());
  });
}

}  // namespace ctree
