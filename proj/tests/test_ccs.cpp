#include <doctest.h>

#include <algorithm>
#include <map>

#include "ctree/ccs.hpp"
#include "ctree/core.hpp"

using namespace ctree;
using namespace ctree::ccs;

namespace {

const DefTable& D() { return DefTable::standard(); }
Budget small() { return Budget{4000, 10000}; }
// Replication makes many random terms infinite-state, and closure cost grows
// with nesting; random sweeps use a tighter budget.
Budget sweep() { return Budget{100, 2000}; }

Value P(std::string_view s) { return parse(s); }

std::vector<Label> den_initial_labels(const Value& p) {
  std::vector<Label> out;
  for (const auto& m : transitions(D(), denote(p), small()).moves) out.push_back(m.label);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Label> op_initial_labels(const Value& p) {
  std::vector<Label> out;
  for (const auto& [a, q] : op_transitions(p)) out.push_back(to_label(a));
  std::sort(out.begin(), out.end());
  return out;
}

bool mentions_bang(const Value& p) { return print(p).find('!') != std::string::npos; }

}  // namespace

TEST_CASE("parsing") {
  CHECK(P("a.0 + 'a.0") == plus(prefix(name("a"), nil()), prefix(coname("a"), nil())));
  CHECK(P("new a in (a.0 | 'a.0)") == restrict("a", par(prefix(name("a"), nil()), prefix(coname("a"), nil()))));
  CHECK(P("!a.0") == bang(prefix(name("a"), nil())));
  CHECK(P("a.0 | b.0 + c.0") == plus(par(P("a.0"), P("b.0")), P("c.0")));
  CHECK(P("tau.a.0") == prefix(tau_action(), P("a.0")));
  CHECK(P("''a.0") == P("a.0"));
  CHECK(complement(complement(name("a"))) == name("a"));

  try {
    P("a.0 +\n  ");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 3);
  }
  CHECK_THROWS_AS(P("a"), SyntaxError);
  CHECK_THROWS_AS(P("'tau.0"), SyntaxError);
  CHECK_THROWS_AS(P("(a.0"), SyntaxError);
  CHECK_THROWS_AS(P("a.0 0"), SyntaxError);

  ProcGen g(7);
  for (int i = 0; i < 300; ++i) {
    Value p = g.process(8);
    CHECK(size(p) <= 8);
    CHECK_MESSAGE(parse(print(p)) == p, print(p));
  }
  CHECK(print(P("(new a in a.0) + b.0")) == "(new a in a.0) + b.0");
  CHECK(channels(P("new c in a.'b.0")) == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("operational steps") {
  using Steps = std::vector<std::pair<Value, Value>>;
  CHECK(op_transitions(P("a.0")) == Steps{{name("a"), nil()}});
  auto sync = op_transitions(P("a.0 | 'a.0"), Mode::Verbatim);
  CHECK(std::count(sync.begin(), sync.end(), std::pair{tau_action(), par(nil(), nil())}) == 1);
  CHECK(sync.size() == 3);
  CHECK(op_transitions(P("new a in a.0")).empty());
  CHECK(op_transitions(P("new a in b.0"), Mode::Verbatim) == Steps{{name("b"), restrict("a", nil())}});
  CHECK(op_transitions(P("new a in b.0")) == Steps{{name("b"), nil()}});
  CHECK(op_transitions(P("0")).empty());
  // !a.0 steps to 0 | !a.0, identified with !a.0 when collapsing.
  CHECK(op_transitions(P("!a.0"), Mode::Verbatim) == Steps{{name("a"), par(nil(), P("!a.0"))}});
  CHECK(op_transitions(P("!a.0")) == Steps{{name("a"), P("!a.0")}});
  auto bang_sync = op_transitions(P("!(a.0 + 'a.0)"));
  CHECK(std::count_if(bang_sync.begin(), bang_sync.end(), [](auto& s) { return is_tau(s.first); }) == 1);
}

TEST_CASE("a.0 | 'a.0 has four reachable states") {
  Value p = P("a.0 | 'a.0");
  FiniteLTS op = op_lts({p}, small(), Mode::Verbatim);
  CHECK(op.size() == 4);
  CHECK(op.transitions.size() == 5);
  bool has_tau = std::any_of(op.transitions.begin(), op.transitions.end(),
                             [&](const auto& tr) { return op.labels[tr.label] == Label::tau(); });
  CHECK(has_tau);
  CHECK_FALSE(op.partial);
  for (Mode m : {Mode::Verbatim, Mode::Collapse}) {
    FiniteLTS den = den_lts({p}, small(), m);
    CHECK_FALSE(den.partial);
    FiniteLTS both = op_lts({p}, small(), m);
    CHECK(check_den_bisim(p, P("a.'a.0 + 'a.a.0 + tau.0"), small()).is_holds());
    CHECK(bisim_partition(den).size() == bisim_partition(both).size());
  }
}

TEST_CASE("denotations") {
  CHECK(D().unfold(denote(nil())) == stuck_d());
  Value ab = brD_of({seq(trigger(act_event(name("a"))), stuck_d()), seq(trigger(act_event(name("b"))), stuck_d())});
  CHECK(check_equ(D(), denote(P("a.0 + b.0")), ab, small()).is_holds());

  Value k = k_const(stuck_d());
  Value a = a_vis(act_event(name("a")), k), co_a = a_vis(act_event(coname("a")), k), b = a_vis(act_event(name("b")), k);
  Value synced = D().unfold(call("ccs.lr2", {vint(1), a, co_a}));
  CHECK(node_kind(synced) == NodeKind::Br);
  CHECK(br_kind(synced) == BranchKind::Stepping);
  CHECK(br_width(synced) == 1);
  CHECK(D().unfold(call("ccs.lr2", {vint(1), a, b})) == stuck_d());
  CHECK(D().unfold(call("ccs.lr2", {vint(1), a_vis(act_event(tau_action()), k), a_vis(act_event(tau_action()), k)})) ==
        stuck_d());

  // Processes never return.
  ProcGen g(11);
  for (int i = 0; i < 50; ++i) {
    FiniteLTS l = den_lts({g.process(6)}, sweep());
    for (const auto& lab : l.labels) CHECK_FALSE(lab.is_val());
  }
}

TEST_CASE("basic bisimilarities") {
  for (auto check : {check_op_bisim, check_den_bisim}) {
    CHECK(check(P("a.0 + b.0"), P("b.0 + a.0"), small()).is_holds());
    CHECK(check(P("a.0"), P("b.0"), small()).is_fails());
    CHECK(check(P("a.(b.0 + c.0)"), P("a.b.0 + a.c.0"), small()).is_fails());
    CHECK(check(P("!a.0"), P("!a.0 | a.0"), small()).is_holds());
    CHECK(check(P("!(a.0 + 'a.0)"), P("!(a.0 + 'a.0) | (a.0 + 'a.0)"), small()).is_holds());
    CHECK(check(P("a.b.0 | 0"), P("a.b.0"), small()).is_holds());
    CHECK(check(P("new a in (a.0 | 'a.b.0)"), P("tau.b.0"), small()).is_holds());
  }
  CHECK(check_op_wbisim(P("tau.a.0"), P("a.0"), small()).is_holds());
  CHECK(check_den_wbisim(P("tau.a.0"), P("a.0"), small()).is_holds());
  CHECK(check_den_bisim(P("tau.a.0"), P("a.0"), small()).is_fails());
  CHECK(check_den_wbisim(P("tau.a.0 + b.0"), P("a.0 + b.0"), small()).is_fails());

  auto w = check_den_bisim(P("a.b.0"), P("a.c.0"), small());
  REQUIRE(w.is_fails());
  CHECK_FALSE(w.witness().trace.empty());
}

TEST_CASE("equations hold on random instances") {
  ProcGen g(2024);
  std::map<std::string, std::function<std::pair<Value, Value>(const Value&, const Value&, const Value&)>> eqs{
      {"plus_comm", [](auto& p, auto& q, auto&) { return std::pair{plus(p, q), plus(q, p)}; }},
      {"plus_assoc", [](auto& p, auto& q, auto& r) { return std::pair{plus(plus(p, q), r), plus(p, plus(q, r))}; }},
      {"plus_unit", [](auto& p, auto&, auto&) { return std::pair{plus(p, nil()), p}; }},
      {"plus_idem", [](auto& p, auto&, auto&) { return std::pair{plus(p, p), p}; }},
      {"par_unit", [](auto& p, auto&, auto&) { return std::pair{par(p, nil()), p}; }},
      {"par_comm", [](auto& p, auto& q, auto&) { return std::pair{par(p, q), par(q, p)}; }},
      {"par_assoc", [](auto& p, auto& q, auto& r) { return std::pair{par(par(p, q), r), par(p, par(q, r))}; }},
      {"bang_unfold", [](auto& p, auto&, auto&) { return std::pair{bang(p), par(bang(p), p)}; }},
  };
  // Instances whose LTS does not fit the budget are drawn again, up to 200
  // times per equation.
  for (const auto& [label, eq] : eqs) {
    int holds = 0, skipped = 0;
    while (holds < 20 && skipped < 200) {
      Value p = g.process(3), q = g.process(3), r = g.process(3);
      auto [lhs, rhs] = eq(p, q, r);
      Verdict v = check_den_bisim(lhs, rhs, sweep());
      Verdict o = check_op_bisim(lhs, rhs, sweep());
      CHECK_MESSAGE(!v.is_fails(), label << ": " << print(lhs) << " vs " << print(rhs));
      CHECK_MESSAGE(!o.is_fails(), label << ": " << print(lhs) << " vs " << print(rhs));
      if (v.is_holds() && o.is_holds()) {
        ++holds;
      } else {
        ++skipped;
      }
    }
    MESSAGE(label << ": " << holds << " holds, " << skipped << " redrawn");
    CHECK(holds == 20);
  }
}

TEST_CASE("operational and denotational bisimilarity agree") {
  ProcGen g(5);
  int unknown = 0, holds = 0, fails = 0;
  for (int i = 0; i < 200; ++i) {
    Value p = g.process(6);
    Value q = (i % 2) ? g.variant(p) : g.process(6);
    REQUIRE(size(q) <= 6);
    Verdict o = check_op_bisim(p, q, sweep());
    Verdict d = check_den_bisim(p, q, sweep());
    if (o.is_unknown() || d.is_unknown()) {
      ++unknown;
      continue;
    }
    CHECK_MESSAGE(o.is_holds() == d.is_holds(), print(p) << " vs " << print(q));
    (o.is_holds() ? holds : fails)++;
  }
  MESSAGE(holds << " holds, " << fails << " fails, " << unknown << " unknown");
  CHECK(unknown < 10);
  CHECK(holds > 20);
  CHECK(fails > 20);
}

TEST_CASE("initial labels correspond") {
  ProcGen g(99);
  for (int i = 0; i < 300; ++i) {
    Value p = g.process(6);
    auto op = op_initial_labels(p), den = den_initial_labels(p);
    if (mentions_bang(p)) {
      op.erase(std::unique(op.begin(), op.end()), op.end());
      den.erase(std::unique(den.begin(), den.end()), den.end());
    }
    CHECK_MESSAGE(op == den, print(p));
  }
}

TEST_CASE("restricted channels are never observed") {
  ProcGen g(3);
  for (int i = 0; i < 100; ++i) {
    Value p = restrict("a", g.process(6));
    FiniteLTS l = den_lts({p}, sweep());
    for (const auto& lab : l.labels) {
      if (!lab.is_obs()) continue;
      const Value& act = event_args(lab.event())[0];
      CHECK(act != name("a"));
      CHECK(act != coname("a"));
    }
  }
}
